#!/usr/bin/env python3
"""Sweep the greedy family and tabulate how badly the truncated objective
misranks: the gap J(all-patient) - J(all-greedy) = M - (H+1) grows without
bound in the penalty while the truncated objective still prefers greedy."""

from fractions import Fraction

import shortsight as ss


def main() -> None:
    print(f"{'H':>3} {'M':>8} {'J_H(greedy)':>12} {'J(greedy)':>10} {'J(patient)':>11} {'gap':>8}")
    for h in range(1, 7):
        for m in (Fraction(h + 2), Fraction(4 * (h + 2)), Fraction(40 * (h + 2))):
            mdp, _ = ss.build_greedy(h, m)
            all_greedy, all_patient = ss.greedy_policies(mdp)
            jh = ss.truncated_return(mdp, all_greedy, h)
            jg = ss.full_return(mdp, all_greedy)
            jp = ss.full_return(mdp, all_patient)
            gap = jp - jg
            assert gap == m - (h + 1)
            print(f"{h:>3} {str(m):>8} {str(jh):>12} {str(jg):>10} {str(jp):>11} {str(gap):>8}")


if __name__ == "__main__":
    main()
