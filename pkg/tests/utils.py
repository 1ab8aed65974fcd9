from tigerhunt.surface import SurfaceModel, build

BANANA = """
surface P2
curve A degree 1
curve B degree 2
curve D degree 1
curve M degree 1
point d on B D contact B:D=2
point a on A B
point b on A B M contact B:M=2
blowup d along D times 3 as Ed
blowup b along B times 5 as Eb
blowup a along A times 5 as Ea
"""

BANANA_HUNT = """
surface P2
curve A degree 1
curve B degree 2
curve D degree 1
point d on B D contact B:D=2
point a on A B
point b on A B
blowup d along D times 3 as Ed
blowup b along B times 5 as Eb
blowup a along A times 5 as Ea
"""

# A (3) point: C meets the (-3)-curve E once.
ONE_POINT = """
surface abstract k2 0 rho 2
curve C self 0 kdeg -2
curve E self -3 kdeg 1
intersect C E 1
"""

TWO_LINES = """
curve A degree 1
curve B degree 1
point p on A B
"""

LINE_AND_CONIC = """
curve B degree 2
curve D degree 1
point d on B D contact B:D=2
"""


def model(text: str) -> SurfaceModel:
    return build(text).model()
