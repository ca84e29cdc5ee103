"""
cyclewalk - exakte Periodizität und Zeta-Funktionen von Grover-Walks auf Kreisgraphen
"""
