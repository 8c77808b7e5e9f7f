"""
Pydantic models and data structures
"""
