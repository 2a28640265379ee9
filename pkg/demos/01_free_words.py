"""
Free-group words and homomorphisms
==================================

Reduced words, products, inverses and the images of words under a map
between free groups.
"""
from slopegrowth.spectrum import free_sphere_size
from slopegrowth.words import Alphabet, GeneratorMap, apply_map, parse_word

# two free groups: F_2 on a1, a2 and F_3 on b1, b2, b3
A = Alphabet.standard("a", 2)
B = Alphabet.standard("b", 3)

# words are reduced as soon as they are built
u = parse_word("a1 a2 a2^-1 a1", A)
print("u =", u.to_literal(), "length", len(u))

v = parse_word("a1^-1 a2^3", A)
print("u v =", (u * v).to_literal())
print("(u v)^-1 =", (~(u * v)).to_literal())

# a homomorphism is fixed by the images of the generators
h = GeneratorMap(A, B, (parse_word("b1 b2", B), parse_word("b3^-1", B)))
print("h(u v) =", apply_map(h, u * v).to_literal())

# sphere sizes of free groups: 2m (2m-1)^(k-1)
for m in (2, 3, 4):
    print(f"F_{m}:", [free_sphere_size(m, k) for k in range(7)])
