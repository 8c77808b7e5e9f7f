"""
Numerical services: Fock-space states, kernels, geometry, datasets, SVM, lattice
"""
