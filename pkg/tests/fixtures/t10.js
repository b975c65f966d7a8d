(![]+[])[+!![]]
