"""
Static tables: dataset presets, default search grids and reference scores
"""
