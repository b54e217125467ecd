"""Exact verification kernel for R(p,q)-deformed super Witt and Virasoro algebras."""
