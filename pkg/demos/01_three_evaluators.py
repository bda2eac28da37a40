"""Evaluate one scenario three ways and compare.

The closed-form lemmas, the nested adaptive integral and the protocol
simulation share only the scenario model, so agreement between them is a
check on all three.
"""

from pathlib import Path

from sscp import McConfig, estimate_sscp, load_config, sscp_analytic, sscp_ref

cfg = load_config(Path(__file__).with_name("scenario.yaml"))

ana = sscp_analytic(cfg)
ref = sscp_ref(cfg)
mc = estimate_sscp(cfg, McConfig(trials=400_000, seed=1))

print(f"closed form ({ana.method}):  {ana.value:.6f}")
print(f"direct integral:         {ref.value:.6f}  (bound {ref.error_bound:.1e}, "
      f"{ref.extra['evaluations']} evaluations)")
print(f"Monte-Carlo:             {mc.value:.6f} +/- {mc.stderr:.6f}")

# perfect SIC switches the closed form to the second lemma
p = cfg.replace(nu1=0.0)
print(f"\nperfect SIC: {sscp_analytic(p).value:.6f} ({sscp_analytic(p).method}) "
      f"vs integral {sscp_ref(p).value:.6f}")
