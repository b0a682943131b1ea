"""Arithmetic and verification services"""
