"""Small hand-built taxonomies used in examples, tests and the CLI demo."""

# Two unrelated roots sharing the ambiguous word "java".
DRINK_TAXONOMY = """\
synset BEVERAGE
synset ISLAND
word java BEVERAGE
word java ISLAND
word water BEVERAGE
"""

DRINK_OBSERVATIONS = """\
drink\tobject\tjava\t1
drink\tobject\twater\t1
"""

# "meat" is ambiguous between a food class and a cognition class; every other
# word has a single sense one level below FOOD.
EAT_TAXONOMY = """\
synset FOOD
synset COGNITION
synset FRUIT
synset BREAD
synset DAIRY
synset MEAT_CLASS
synset CONTENT
hyponym FRUIT FOOD
hyponym BREAD FOOD
hyponym DAIRY FOOD
hyponym MEAT_CLASS FOOD
hyponym CONTENT COGNITION
word apple FRUIT
word bagel BREAD
word cheese DAIRY
word meat MEAT_CLASS
word meat CONTENT
"""

EAT_OBSERVATIONS = """\
eat\tobject\tmeat\t1
eat\tobject\tapple\t1
eat\tobject\tbagel\t1
eat\tobject\tcheese\t1
"""


def drink_taxonomy():
    from .taxonomy import parse_taxonomy

    return parse_taxonomy(DRINK_TAXONOMY)


def eat_taxonomy():
    from .taxonomy import parse_taxonomy

    return parse_taxonomy(EAT_TAXONOMY)
