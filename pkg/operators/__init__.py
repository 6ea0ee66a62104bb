"""
Fractional integral operators evaluated by kernel quadrature
"""
