"""
Utility modules for logging, errors, and common functions
"""
