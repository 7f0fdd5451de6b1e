"""
Scripts de verificação e relatórios do transporte de ergotropia
"""
