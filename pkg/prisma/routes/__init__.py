# Command routes
"""
Command handlers, grouped like API routers:
- compute.py: cones, Hilbert bases, monoid expressions, faces
- trees.py: tree groups, generator tuples, group completion
- verify.py: verification suites and cache maintenance
"""
