"""sin(f t) for growing f: the truncated weak distance to zero vanishes while
the L2 norm on [0, 1] approaches 1/2 only at rate 1/f.
"""

import math

from cadlag_lab.lab import l2w_sine_probe


def main():
    rep = l2w_sine_probe()
    print(f"{'f':>4}{'d_trunc':>12}{'|x|^2 on [0,1]':>18}{'closed form':>14}")
    for f in (1, 4, 16, 64):
        exact = 0.5 - math.sin(2 * f) / (4 * f)
        print(f"{f:>4}{rep.value('d_trunc', n=f):12.5f}{rep.value('norm_sq', n=f):18.5f}{exact:14.5f}")


if __name__ == "__main__":
    main()
