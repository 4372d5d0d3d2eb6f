"""
hdrconform.tests
================

Conformance toolkit tests, to be run with pytest
"""
