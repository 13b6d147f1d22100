"""Generate frozen expected values for the rational-function tests.

Run directly; paste the printed literals into tests/test_coeffs.py.  Uses
sympy as the independent oracle so the package's own arithmetic never checks
itself.
"""

import sympy as sp

z = sp.symbols("z")


def show(label, expr):
    print(f"{label}: {expr}")


def main():
    # polynomial part + partial fractions of z^3/(z-1)
    f = z**3 / (z - 1)
    show("apart z^3/(z-1)", sp.apart(f, z))

    # 5z/(z^2-4)
    f = 5 * z / (z**2 - 4)
    show("apart 5z/(z^2-4)", sp.apart(f, z))

    # 1/(z-i)^2
    f = 1 / (z - sp.I) ** 2
    show("apart 1/(z-I)^2", sp.apart(f, z, full=True).doit())

    # residue examples
    show("residue z^2/((z-1)(z-2)^2) at 2",
         sp.residue(z**2 / ((z - 1) * (z - 2) ** 2), z, 2))
    show("residue z^2/((z-1)(z-2)^2) at 1",
         sp.residue(z**2 / ((z - 1) * (z - 2) ** 2), z, 1))
    show("residue of derivative of 1/((z-1)(z+2)) at 1",
         sp.residue(sp.diff(1 / ((z - 1) * (z + 2)), z), z, 1))

    # a messier decomposition used as a frozen case:
    # (3z^4 - z + 2) / ((z-1)^2 (z+1) (z-3))
    f = (3 * z**4 - z + 2) / ((z - 1) ** 2 * (z + 1) * (z - 3))
    show("apart big", sp.apart(f, z))

    # Moebius composition: f = (z^2+1)/(z-2), mu(s) = (2s+1)/(s-1)
    mu = (2 * z + 1) / (z - 1)
    f = (z**2 + 1) / (z - 2)
    comp = sp.cancel(sp.together(f.subs(z, mu)))
    show("compose", sp.factor(comp))

    # derivative of 1/(z^2-1) partial fractions
    show("apart d/dz 1/(z^2-1)", sp.apart(sp.diff(1 / (z**2 - 1), z), z))


if __name__ == "__main__":
    main()
