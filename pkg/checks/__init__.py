# Prüfkatalog
