"""
Test suite for pysoac
"""
