#!/usr/bin/env python3
"""Run the full reference-scale analysis end to end and print a summary.

Generates one synthetic run (200k vacuum calibration events + 12k signal
events by default), reconstructs it, and prints: the vacuum calibration,
the efficiency fit, the density-matrix diagonals with both error estimates,
the Wigner-function origin obtained three ways (from rho_11, from the
smoothed-and-inverted radial profile, and from the fitted efficiency), and
the independent multiplicative efficiency budget with its agreement check
against the fitted value.
"""

from __future__ import annotations

import argparse
import sys

from focktomo import (
    DetectorModel,
    ReconstructionConfig,
    RunSpec,
    check_agreement,
    combine,
    default_factors,
    generate_run,
    load_factors,
    reconstruct_dataset,
    wigner_radial,
)


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eta", type=float, default=0.553,
                   help="true detection efficiency of the synthetic run")
    p.add_argument("--n-vacuum", type=int, default=200_000,
                   help="vacuum calibration events")
    p.add_argument("--n-fock", type=int, default=12_000,
                   help="signal (single-photon) events")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--scale", type=float, default=1.0,
                   help="detector gain applied to raw values")
    p.add_argument("--offset", type=float, default=0.0,
                   help="detector offset applied to raw values")
    p.add_argument("--dark-fraction", type=float, default=0.0,
                   help="fraction of signal events replaced by vacuum-like dark events")
    p.add_argument("--fit-method", choices=("mle", "hist"), default="mle")
    p.add_argument("--bandwidth-scale", type=float, default=1.0)
    p.add_argument("--factors", type=str, default=None,
                   help="optional efficiency-factor table (name value uncertainty kind per line)")
    return p.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)

    spec = RunSpec(
        eta_true=args.eta,
        n_vacuum=args.n_vacuum,
        n_fock=args.n_fock,
        detector=DetectorModel(scale=args.scale, offset=args.offset,
                               dark_fraction=args.dark_fraction),
        seed=args.seed,
    )
    print("== synthetic run ==")
    print(f"eta_true={args.eta}  n_vacuum={args.n_vacuum}  n_fock={args.n_fock}"
          f"  seed={args.seed}  dark_fraction={args.dark_fraction}")
    dataset = generate_run(spec)

    config = ReconstructionConfig(fit_method=args.fit_method,
                                  bandwidth_scale=args.bandwidth_scale)
    summary = reconstruct_dataset(dataset, config)

    cal = summary.calibration
    print()
    print(f"== vacuum calibration ({cal.method}, n={cal.n_used}) ==")
    print(f"scale_hat  = {cal.scale_hat:+.6f}")
    print(f"offset_hat = {cal.offset_hat:+.6f}")
    print(f"residual   = {cal.fit_residual:.3e}")

    eff = summary.efficiency
    print()
    print(f"== efficiency fit ({eff.method}, n={eff.n_used},"
          f" analysis_source={summary.analysis_source}) ==")
    flag = "  [at boundary]" if eff.at_boundary else ""
    print(f"eta_hat = {eff.eta_hat:.4f} +/- {eff.eta_stderr:.4f}{flag}")

    print()
    print("== density-matrix diagonals (pattern-function sampling) ==")
    print("  n    rho_nn      sigma (centered)  sigma (uncentered)")
    for d in summary.diagonals:
        print(f"  {d.n}  {d.rho_nn:+.5f}     {d.sigma_nn:.5f}           "
              f"{d.sigma_nn_uncentered:.5f}")
    total = sum(d.rho_nn for d in summary.diagonals)
    print(f"  sum over n <= {summary.diagonals[-1].n}: {total:.5f}")

    print()
    print("== Wigner function at the origin ==")
    print(f"from rho_11     : {summary.wigner_origin_from_rho:+.5f}"
          f" +/- {summary.wigner_origin_sigma:.5f}")
    print(f"reconstructed   : {summary.wigner_origin_reconstructed:+.5f}")
    print(f"model at eta_hat: {float(wigner_radial(eff.eta_hat, 0.0)):+.5f}")
    print(f"rho_11 consistent with eta_hat: {summary.origin_consistent_with_fit()}")

    factors = load_factors(args.factors) if args.factors else default_factors()
    result = combine(factors)
    print()
    print("== independent efficiency budget ==")
    for f in factors:
        print(f"  {f.name:<28s} {f.value:.3f} +/- {f.uncertainty:.3f}  ({f.kind})"
              f"  -> {f.effective_value:.4f}")
    print(f"eta_predicted = {result.eta_predicted:.4f} +/- {result.eta_uncertainty:.4f}")

    agreement = check_agreement(result, eff.eta_hat, eff.eta_stderr)
    print()
    print("== budget vs fit ==")
    n_sigma = 2.0 * agreement.difference / agreement.tolerance
    print(f"|difference| = {agreement.difference:.4f}"
          f"  ({n_sigma:.2f} combined sigma; band is 2.00)"
          f"  -> {'agree' if agreement.passed else 'DISAGREE'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
