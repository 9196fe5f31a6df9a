"""Bilateral weighted backward shifts on spaces of analytic functions on an annulus."""
