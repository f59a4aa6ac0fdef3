"""
Tests for the hyperwell bound-state solver
"""
