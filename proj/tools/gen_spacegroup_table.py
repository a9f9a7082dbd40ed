#!/usr/bin/env python3
"""Regenerate data/spacegroups.txt from gemmi's space-group tables.

Writes one block per space group (standard setting, hexagonal axes for the
rhombohedral groups) with every general position listed, centering
translations expanded. Only needed when the table itself must be rebuilt.

    pip install gemmi
    python3 tools/gen_spacegroup_table.py > data/spacegroups.txt
"""
import sys

import gemmi


def setting_for(number):
    sg = gemmi.find_spacegroup_by_number(number)
    # Rhombohedral groups come first in hexagonal axes already ("H").
    assert not sg.hm.startswith("R") or sg.ext == "H", sg.xhm()
    return sg


def main():
    out = sys.stdout
    out.write("# General positions for the 230 space groups.\n")
    out.write("# Generated by tools/gen_spacegroup_table.py from gemmi %s.\n"
              % gemmi.__version__)
    out.write("# Block: '<number> <Hermann-Mauguin symbol>' then one\n")
    out.write("# coordinate triplet per line. Rhombohedral groups use\n")
    out.write("# hexagonal (obverse) axes.\n")
    for number in range(1, 231):
        sg = setting_for(number)
        out.write("\n%d %s\n" % (number, sg.hm))
        for op in sg.operations():
            for t in op.tran:
                assert (t * 12) % gemmi.Op.DEN == 0, (number, op.triplet())
            out.write(op.triplet() + "\n")


if __name__ == "__main__":
    main()
