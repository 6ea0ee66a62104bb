"""
Monitoring module for evaluation metrics and reduction self-checks
"""
