"""Utility modules for hyperwell"""
