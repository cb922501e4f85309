"""apdiff: cut-and-project schemes, modulated model-set combs and
their pure point diffraction.

"""
