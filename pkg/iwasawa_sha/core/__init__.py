"""Core configuration and setup"""
