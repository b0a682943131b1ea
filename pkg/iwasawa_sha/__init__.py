"""Iwasawa Sha verification toolkit"""
__version__ = "0.3.0"
