"""Fast, slow and merged weighting under a mid-stream role reversal.

Forecaster A wins for the first thirty update steps, then forecaster B
wins. The slow weighter needs the cumulative sums to cross before it
changes its mind; the fast weighter flips within its window; the merge
weighter notices which of the two is currently combining better and
shifts the final weight accordingly.
"""

from adapts import ChannelWeighter, combine

w = ChannelWeighter(eta=0.5, fast_window=5, warmup_steps=0)

print("step  loss_A  loss_B   w_slow  w_fast  beta   w_final")
for step in range(1, 61):
    if step <= 30:
        loss_a, loss_b = 0.2, 1.0      # A clearly better
    else:
        loss_a, loss_b = 1.0, 0.2      # roles reverse
    # score both candidate combinations with the pre-update weights
    loss_fast = loss_a * w.fast_weight() + loss_b * (1 - w.fast_weight())
    loss_slow = loss_a * w.w_slow + loss_b * (1 - w.w_slow)
    w.update(loss_a, loss_b, loss_fast, loss_slow)
    if step % 5 == 0 or 30 < step <= 40:
        print(f"{step:4d}  {loss_a:5.2f}  {loss_b:6.2f}  {w.w_slow:7.3f}"
              f"  {w.fast_weight():6.3f}  {w.beta_merge:5.3f}  {w.current_weight():7.3f}")

print()
final = combine([1.0, 1.0], [0.0, 0.0], w.current_weight())
print(f"a combined forecast now leans on forecaster B: {final}")
