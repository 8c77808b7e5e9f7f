"""
Command handlers for the kerrkit command-line interface
"""
