"""
File-format adapters: Gram cache, dataset storage and archive loaders
"""
