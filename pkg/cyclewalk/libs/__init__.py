# Exakte Arithmetik (Q, Q[x], Q(ζ_N))
