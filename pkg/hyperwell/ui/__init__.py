"""Console UI helpers"""
