"""Witt-Burnside rings of finite p-groups."""
