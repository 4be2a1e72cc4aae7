"""Walk through menu ingestion: raw text to padded index matrix."""

from dishrank import build_vocabulary, load_bundled_lexicon, pack_menu, parse_menu_text, standardize_dish

MENU_TEXT = """\
# Lunch specials
Grilled Chicken Salad
Extra Spicy Beef Noodle Soup
Green Tea

Fried Rice
"""

lexicon = load_bundled_lexicon()
vocab = build_vocabulary(lexicon.records)
print(f"vocabulary: {vocab.size} indices ({len(vocab)} words + PAD + UNK)")

dishes = parse_menu_text(MENU_TEXT)
print(f"\nparsed {len(dishes)} dishes (comments and blanks skipped):")
for dish in dishes:
    tokens = standardize_dish(dish)
    print(f"  {dish!r:40} -> {tokens}")

menu = pack_menu(dishes, vocab)
print(f"\npacked menu: {menu.height} x 3 word indices, mask all valid")
for dish, row in zip(dishes, menu.indices):
    print(f"  {dish:35} {row}")

print("\nnote the zero padding after short names, and that the four-word")
print("dish was truncated to its first three words before lookup.")
