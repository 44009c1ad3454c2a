"""Bitmaps of the built-in font: 8 columns x 15 rows per symbol, '#' = ink.

A..J stand in for the Roman numerals above M (5000 .. 5000000); they are
drawn as the Latin letters of the same name.
"""

GLYPH_ART = {
    "0": """
........
..####..
.######.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.######.
..####..
........""",
    "1": """
........
...##...
..###...
.####...
...##...
...##...
...##...
...##...
...##...
...##...
...##...
...##...
.######.
.######.
........""",
    "2": """
........
..####..
.######.
.##..##.
.....##.
.....##.
....##..
...##...
..##....
.##.....
.##.....
.##.....
.######.
.######.
........""",
    "3": """
........
..####..
.######.
.##..##.
.....##.
.....##.
...####.
...####.
.....##.
.....##.
.....##.
.##..##.
.######.
..####..
........""",
    "4": """
........
....##..
...###..
..####..
.##.##..
.##.##..
.##.##..
.######.
.######.
....##..
....##..
....##..
....##..
....##..
........""",
    "5": """
........
.######.
.######.
.##.....
.##.....
.#####..
.######.
.....##.
.....##.
.....##.
.....##.
.##..##.
.######.
..####..
........""",
    "6": """
........
..####..
.######.
.##.....
.##.....
.#####..
.######.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.######.
..####..
........""",
    "7": """
........
.######.
.######.
.....##.
.....##.
....##..
....##..
...##...
...##...
...##...
..##....
..##....
..##....
..##....
........""",
    "8": """
........
..####..
.######.
.##..##.
.##..##.
.##..##.
..####..
..####..
.##..##.
.##..##.
.##..##.
.##..##.
.######.
..####..
........""",
    "9": """
........
..####..
.######.
.##..##.
.##..##.
.##..##.
.##..##.
.######.
..#####.
.....##.
.....##.
.....##.
.######.
..####..
........""",
    "I": """
........
.######.
.######.
...##...
...##...
...##...
...##...
...##...
...##...
...##...
...##...
...##...
.######.
.######.
........""",
    "V": """
........
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
..####..
..####..
...##...
...##...
........""",
    "X": """
........
.##..##.
.##..##.
.##..##.
..####..
..####..
...##...
...##...
...##...
..####..
..####..
.##..##.
.##..##.
.##..##.
........""",
    "L": """
........
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.######.
.######.
........""",
    "C": """
........
..####..
.######.
.##..##.
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
.##..##.
.######.
..####..
........""",
    "D": """
........
.####...
.#####..
.##.##..
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##.##..
.#####..
.####...
........""",
    "M": """
........
.#....#.
.##..##.
.######.
.######.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
........""",
    "A": """
........
...##...
..####..
.##..##.
.##..##.
.##..##.
.##..##.
.######.
.######.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
........""",
    "B": """
........
.#####..
.##..##.
.##..##.
.##..##.
.##.##..
.####...
.#####..
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.#####..
........""",
    "E": """
........
.######.
.######.
.##.....
.##.....
.##.....
.#####..
.#####..
.##.....
.##.....
.##.....
.##.....
.######.
.######.
........""",
    "F": """
........
.######.
.######.
.##.....
.##.....
.##.....
.#####..
.#####..
.##.....
.##.....
.##.....
.##.....
.##.....
.##.....
........""",
    "G": """
........
..####..
.######.
.##..##.
.##.....
.##.....
.##.....
.##.###.
.##.###.
.##..##.
.##..##.
.##..##.
.######.
..####..
........""",
    "H": """
........
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
.######.
.######.
.##..##.
.##..##.
.##..##.
.##..##.
.##..##.
........""",
    "J": """
........
.######.
.######.
....##..
....##..
....##..
....##..
....##..
....##..
....##..
....##..
.##.##..
.#####..
..###...
........""",
}
