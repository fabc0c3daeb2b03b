//! Subcommand definitions and dispatch.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use hausdorff_core::canonical::{
    bn_alternating_crosscheck, canonical_density_bound, canonical_from_moments, conv_group_power,
    convolution_root_check, group_law_check, group_law_defect, series_exp_identity,
};
use hausdorff_core::config;
use hausdorff_core::densities::{
    binom_integral_with_error, density_cdf, density_moment_with_error, f_p, mp_density, w2, w_p,
    DensitySpec,
};
use hausdorff_core::fusscatalan::{
    binomial_sequence, fc_alternating_identity, fc_canonical_sequence, fc_sequence, tau, tau_f64,
    FcParams,
};
use hausdorff_core::genfun::{
    atom_mass_left, atom_mass_right, eval_bp, eval_bpr, eval_epr, left_sequence, pick_scan, psi,
    right_sequence, ArcRegion, ComplexPoint, GenFun, Rect, Region, C64,
};
use hausdorff_core::hausdorff::reconstruct_cdf;
use hausdorff_core::seqcore::{
    check_completely_alternating, check_completely_monotone, check_concave_moments,
    check_convex_moments, check_dilated_hausdorff, compose_truncation_bound, compound_compose,
    convolve, default_tol, diaconis_freedman_array, dilate_compound, exchangeable_compound,
    finite_difference, leading_differences, CompoundOptions, MonotonicityReport,
};
use hausdorff_core::spectra::{compare_to_fc, sample_product_moments, SpectraConfig};
use hausdorff_core::{Error, Scalar, ScalarKind, Sequence};
use serde_json::json;

use crate::input::{self, complex, real, OtherSeq, SeqInput};
use crate::output::Output;
use crate::Cli;

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Truncated complete-monotonicity test.
    CheckCm(SeqArgs),
    /// Complete alternation: increments completely monotone.
    CheckAlt(SeqArgs),
    /// Moments of a measure on [0, tau]: (c_j tau^-j) completely monotone.
    CheckDilated(DilatedArgs),
    /// Moments of a convex (increasing) density on [0, 1].
    Convex(SeqArgs),
    /// Moments of a concave (decreasing) density on [0, 1].
    Concave(SeqArgs),
    /// Leading differences (I - S)^n c_0; an involution.
    LeadingDiff(SeqArgs),
    /// Compound of c with dilation by p.
    Dilate(DilateArgs),
    /// Compound of c against exchangeable trials mixed by a discrete measure.
    Compound(CompoundArgs),
    /// Fuss-Catalan numbers A_n(p, r), n = 0..count-1.
    Fc(FcArgs),
    /// Binomial sequence C(pn + r - 1, n), n = 0..count-1.
    Binomial(FcArgs),
    /// Canonical sequence of the Fuss-Catalan numbers A_n(p, 1).
    FcCanonical(FcCanonicalArgs),
    /// Canonical sequence b with F'/F = sum b_{k+1} z^k.
    Canonical(SeqArgs),
    /// Convolution power a^(r), the coefficients of F(z)^r.
    Convpow(ConvpowArgs),
    /// Group law a^(r+s) = a^(r) * a^(s).
    Grouplaw(GrouplawArgs),
    /// B_p(z), or B_p(z)^r with --r, by continuation from the origin.
    BpEval(BpEvalArgs),
    /// E_{p,r}(z).
    EprEval(EprEvalArgs),
    /// Scan Im f >= 0 over a rectangle or arc in the upper half plane.
    PickScan(PickScanArgs),
    /// Point mass at tau (right) or 0 (left) from generating-function limits.
    AtomMass(AtomMassArgs),
    /// n-th moment of a density on [0, tau] with a quadrature error estimate.
    DensityMoment(DensityMomentArgs),
    /// Closed-form canonical density w_2(t).
    W2(TArgs),
    /// Canonical density w_p(t) by root solve.
    Wp(WpArgs),
    /// C(r, k) from its trigonometric integral.
    BinomIntegral(BinomIntegralArgs),
    /// Distribution-function estimate on [0, tau] from moments.
    Reconstruct(ReconstructArgs),
    /// Monte Carlo trace moments of products of Gaussian matrices.
    Spectra(SpectraArgs),
    /// Single finite difference (I - S)^k c_j.
    Diff(DiffArgs),
    /// Row n of the triangular array C(n, m) (I - S)^{n-m} c_m.
    Array(OrderArgs),
    /// Cauchy product of two sequences.
    Convolve(BinaryArgs),
    /// Composition G(F(z)) of two sequences' series.
    Compose(BinaryArgs),
    /// tau_p = p^p / (p-1)^(p-1).
    Tau(PArgs),
    /// Both sides of the alternating-sum identity for b_n^(p).
    FcIdentity(FcIdentityArgs),
    /// Canonical sequence two ways (recursion and alternating sum).
    BnCheck(SeqOrderArgs),
    /// exp(sum b_k z^k / k) against F; reports the largest defect.
    ExpIdentity(SeqArgs),
    /// Convolution n-th root raised back to the n-th power.
    RootCheck(SeqOrderArgs),
    /// Lower estimate of ess sup of the canonical density.
    DensityBound(DilatedArgs),
    /// Distribution function of a density at x.
    DensityCdf(DensityCdfArgs),
    /// f_p(u), the inverse of p w_p.
    Fp(FpArgs),
    /// Marchenko-Pastur density on (0, 4).
    MpDensity(TArgs),
    /// psi_p(c) = (c - 1) / c^p at a complex point.
    Psi(PsiArgs),
    /// Print the default numerical configuration.
    Config,
}

#[derive(Args, Debug)]
pub struct SeqArgs {
    #[command(flatten)]
    pub seq: SeqInput,
}

#[derive(Args, Debug)]
pub struct DilatedArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
}

#[derive(Args, Debug)]
pub struct TailArgs {
    /// Tail tolerance for the infinite sums.
    #[arg(long, value_parser = real, default_value_t = config::TAIL_TOL)]
    pub tail_tol: f64,
    /// Tail envelope |c_j| <= SCALE * RATIO^j beyond the given terms.
    #[arg(long, value_name = "SCALE,RATIO")]
    pub envelope: Option<String>,
}

impl TailArgs {
    fn options(&self) -> Result<CompoundOptions> {
        let opts = CompoundOptions::new(self.tail_tol);
        match &self.envelope {
            None => Ok(opts),
            Some(s) => match input::reals(s)?.as_slice() {
                [scale, ratio] => Ok(opts.with_envelope(*scale, *ratio)),
                _ => bail!("--envelope expects SCALE,RATIO"),
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct DilateArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long)]
    pub p: String,
    #[command(flatten)]
    pub tail: TailArgs,
}

#[derive(Args, Debug)]
pub struct CompoundArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    /// Mixing measure on [0, 1] as t:mass,t:mass,...
    #[arg(long)]
    pub atoms: String,
    #[command(flatten)]
    pub tail: TailArgs,
}

#[derive(Args, Debug)]
pub struct FcArgs {
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value = "1")]
    pub r: String,
    #[arg(long)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct FcCanonicalArgs {
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct ConvpowArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
}

#[derive(Args, Debug)]
pub struct GrouplawArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
}

#[derive(Args, Debug)]
pub struct BpEvalArgs {
    #[arg(long, value_parser = real)]
    pub p: f64,
    #[arg(long, value_parser = real)]
    pub r: Option<f64>,
    /// Evaluation point RE,IM.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: (f64, f64),
}

#[derive(Args, Debug)]
pub struct EprEvalArgs {
    #[arg(long, value_parser = real)]
    pub p: f64,
    #[arg(long, value_parser = real)]
    pub r: f64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FunctionKind {
    /// B_p
    B,
    /// B_p^r
    Bpr,
    /// E_{p,r}
    Epr,
    /// z B_p^r
    Zbpr,
    /// Truncated power series of the input sequence.
    Series,
}

#[derive(Args, Debug)]
pub struct FunctionArgs {
    #[arg(long = "function", value_enum, default_value_t = FunctionKind::B)]
    pub kind: FunctionKind,
    #[arg(long, value_parser = real, default_value = "2")]
    pub p: f64,
    #[arg(long, value_parser = real, default_value = "1", allow_hyphen_values = true)]
    pub r: f64,
    /// Sequence for `--function series`.
    #[command(flatten)]
    pub seq: SeqInput,
    /// Convergence radius for `--function series`; estimated if absent.
    #[arg(long, value_parser = real)]
    pub radius: Option<f64>,
}

impl FunctionArgs {
    fn build(&self) -> Result<GenFun> {
        let (p, r) = (self.p, self.r);
        Ok(match self.kind {
            FunctionKind::B => GenFun::FcB { p },
            FunctionKind::Bpr => GenFun::FcBpr { p, r },
            FunctionKind::Epr => GenFun::FcEpr { p, r },
            FunctionKind::Zbpr => GenFun::ZBpr { p, r },
            FunctionKind::Series => {
                GenFun::series(&self.seq.load(ScalarKind::Float)?, self.radius)?
            }
        })
    }
}

#[derive(Args, Debug)]
pub struct PickScanArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Rectangle RE_MIN,RE_MAX,IM_MIN,IM_MAX; default scales with z_p.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "arc")]
    pub rect: Option<String>,
    /// Arc RADIUS or RADIUS,THETA_MIN,THETA_MAX in the upper half plane.
    #[arg(long)]
    pub arc: Option<String>,
    #[arg(long, default_value_t = config::SCAN_RESOLUTION)]
    pub nx: usize,
    #[arg(long, default_value_t = config::SCAN_RESOLUTION)]
    pub ny: usize,
    /// Sample count along an arc.
    #[arg(long, default_value_t = config::SCAN_RESOLUTION)]
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Right,
    Left,
}

#[derive(Args, Debug)]
pub struct AtomMassArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_enum, default_value_t = Side::Right)]
    pub side: Side,
    /// Right end of the support; defaults to tau_p for the Fuss-Catalan
    /// functions.
    #[arg(long, value_parser = real)]
    pub tau: Option<f64>,
    /// Number of points x_i approaching the limit.
    #[arg(long, default_value_t = 30)]
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DensityName {
    /// Marchenko-Pastur on [0, 4].
    Mp,
    /// t dmu_{p,1}(t); p = 2 only.
    MuPp,
    /// Closed-form w_2 on [0, 4].
    W2,
    /// Distribution 1 - p w_p on [0, tau_p].
    WpInverse,
    /// Density -p w_p' through t = f_p(u).
    Arcsine,
    /// Piecewise-linear density from a two-column CSV.
    Custom,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub density: DensityName,
    #[arg(long, value_parser = real, default_value = "2")]
    pub p: f64,
    /// CSV with rows t,w(t) for `--density custom`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = config::N_QUAD)]
    pub n_quad: usize,
}

impl DensityArgs {
    fn spec(&self) -> Result<DensitySpec> {
        Ok(match self.density {
            DensityName::Mp => DensitySpec::marchenko_pastur(),
            DensityName::MuPp => DensitySpec::mu_pp(self.p)?,
            DensityName::W2 => DensitySpec::w2_closed(),
            DensityName::WpInverse => DensitySpec::wp_inverse(self.p)?,
            DensityName::Arcsine => DensitySpec::arcsine_binomial(self.p)?,
            DensityName::Custom => {
                let path = self.csv.as_ref().context("--density custom needs --csv")?;
                DensitySpec::custom_from_csv(&input::read_source(path)?)?
            }
        })
    }
}

#[derive(Args, Debug)]
pub struct DensityMomentArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub n: u32,
}

#[derive(Args, Debug)]
pub struct DensityCdfArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub x: f64,
}

#[derive(Args, Debug)]
pub struct TArgs {
    #[arg(long, value_parser = real)]
    pub t: f64,
}

#[derive(Args, Debug)]
pub struct WpArgs {
    #[arg(long, value_parser = real)]
    pub p: f64,
    #[arg(long, value_parser = real)]
    pub t: f64,
}

#[derive(Args, Debug)]
pub struct FpArgs {
    #[arg(long, value_parser = real)]
    pub p: f64,
    #[arg(long, value_parser = real)]
    pub u: f64,
}

#[derive(Args, Debug)]
pub struct PsiArgs {
    #[arg(long, value_parser = real)]
    pub p: f64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c: (f64, f64),
}

#[derive(Args, Debug)]
pub struct BinomIntegralArgs {
    #[arg(long, value_parser = real)]
    pub r: f64,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = config::N_QUAD)]
    pub n_quad: usize,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    /// Order of the estimate; defaults to the last index given.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "1")]
    pub tau: String,
}

#[derive(Args, Debug)]
pub struct SpectraArgs {
    /// Number of matrix factors.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Matrix size N.
    #[arg(long = "size", short = 'N', default_value_t = 200)]
    pub size: usize,
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Exit 1 when an estimate misses its target by more than
    /// max(REL * target, 3 stderr); flagged moments go to stderr.
    #[arg(long, value_parser = real, value_name = "REL")]
    pub check: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub j: usize,
}

#[derive(Args, Debug)]
pub struct OrderArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct SeqOrderArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct BinaryArgs {
    #[command(flatten)]
    pub seq: SeqInput,
    #[command(flatten)]
    pub other: OtherSeq,
}

#[derive(Args, Debug)]
pub struct PArgs {
    #[arg(long)]
    pub p: String,
}

#[derive(Args, Debug)]
pub struct FcIdentityArgs {
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub n: usize,
}

struct Ctx {
    kind: ScalarKind,
    tol: Option<f64>,
}

impl Ctx {
    fn seq(&self, s: &SeqInput) -> Result<Sequence> {
        s.load(self.kind)
    }

    fn scalar(&self, s: &str, name: &str) -> Result<Scalar> {
        input::scalar(s, self.kind, name)
    }

    fn tol_for(&self, c: &Sequence) -> f64 {
        self.tol.unwrap_or_else(|| default_tol(c))
    }

    /// Report with exit code 1 unless verified.
    fn report(&self, r: MonotonicityReport) -> Result<Output> {
        let bad = !r.verified();
        Ok(Output::of(&r)?.violated_if(bad))
    }

    /// `true` when two values agree: exactly for exact scalars, otherwise
    /// within the tolerance.
    fn agree(&self, a: &Scalar, b: &Scalar) -> bool {
        let d = (a - b).abs();
        match d {
            Scalar::Exact(_) => d.is_zero(),
            Scalar::Float(x) => {
                x <= self
                    .tol
                    .unwrap_or(config::FLOAT_TOL_SCALE * a.to_f64().abs().max(1.0))
            }
        }
    }
}

fn point(z: C64) -> ComplexPoint {
    ComplexPoint { re: z.re, im: z.im }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let ctx = Ctx {
        kind: cli.precision,
        tol: cli.tol,
    };
    let genfun_tol = cli.tol.unwrap_or(config::GENFUN_TOL);
    match &cli.command {
        Command::CheckCm(a) => {
            let c = ctx.seq(&a.seq)?;
            ctx.report(check_completely_monotone(&c, ctx.tol_for(&c)))
        }
        Command::CheckAlt(a) => {
            let c = ctx.seq(&a.seq)?;
            ctx.report(check_completely_alternating(&c, ctx.tol_for(&c))?)
        }
        Command::CheckDilated(a) => {
            let c = ctx.seq(&a.seq)?;
            let tau = ctx.scalar(&a.tau, "tau")?;
            ctx.report(check_dilated_hausdorff(&c, &tau, ctx.tol_for(&c))?)
        }
        Command::Convex(a) => {
            let c = ctx.seq(&a.seq)?;
            ctx.report(check_convex_moments(&c, ctx.tol_for(&c)))
        }
        Command::Concave(a) => {
            let c = ctx.seq(&a.seq)?;
            ctx.report(check_concave_moments(&c, ctx.tol_for(&c)))
        }
        Command::LeadingDiff(a) => Output::sequence(&leading_differences(&ctx.seq(&a.seq)?)),
        Command::Dilate(a) => {
            let c = ctx.seq(&a.seq)?;
            let p = ctx.scalar(&a.p, "p")?;
            Output::sequence(&dilate_compound(&c, &p, &a.tail.options()?)?)
        }
        Command::Compound(a) => {
            let c = ctx.seq(&a.seq)?;
            let nu = input::measure(&a.atoms, ctx.kind)?;
            Output::sequence(&exchangeable_compound(&c, &nu, &a.tail.options()?)?)
        }
        Command::Fc(a) | Command::Binomial(a) => {
            if a.count == 0 {
                return Output::of(&Vec::<Scalar>::new());
            }
            let params = FcParams::new(ctx.scalar(&a.p, "p")?, ctx.scalar(&a.r, "r")?);
            let s = if matches!(cli.command, Command::Fc(_)) {
                fc_sequence(&params, a.count - 1)
            } else {
                binomial_sequence(&params, a.count - 1)
            };
            Output::sequence(&s)
        }
        Command::FcCanonical(a) => {
            if a.count == 0 {
                return Output::of(&Vec::<Scalar>::new());
            }
            let p = ctx.scalar(&a.p, "p")?;
            Output::sequence(&fc_canonical_sequence(&p, a.count - 1)?)
        }
        Command::Canonical(a) => Output::sequence(&canonical_from_moments(&ctx.seq(&a.seq)?)?),
        Command::Convpow(a) => {
            let c = ctx.seq(&a.seq)?;
            Output::of(&conv_group_power(&c, &ctx.scalar(&a.r, "r")?)?)
        }
        Command::Grouplaw(a) => {
            let c = ctx.seq(&a.seq)?;
            let (r, s) = (ctx.scalar(&a.r, "r")?, ctx.scalar(&a.s, "s")?);
            let defect = group_law_defect(&c, &r, &s)?;
            let holds = group_law_check(&c, &r, &s, ctx.tol_for(&c))?;
            Ok(
                Output::of(&json!({ "r": r, "s": s, "defect": defect, "holds": holds }))?
                    .violated_if(!holds),
            )
        }
        Command::BpEval(a) => {
            let z = C64::new(a.z.0, a.z.1);
            let v = match a.r {
                Some(r) => eval_bpr(a.p, r, z, genfun_tol)?,
                None => eval_bp(a.p, z, genfun_tol)?,
            };
            Output::of(&point(v))
        }
        Command::EprEval(a) => {
            let z = C64::new(a.z.0, a.z.1);
            Output::of(&point(eval_epr(a.p, a.r, z, genfun_tol)?))
        }
        Command::PickScan(a) => {
            let f = a.function.build()?;
            let region = if let Some(s) = &a.arc {
                match input::reals(s)?.as_slice() {
                    [radius] => Region::Arc(ArcRegion::upper(*radius, a.points)),
                    [radius, lo, hi] => Region::Arc(ArcRegion {
                        radius: *radius,
                        theta_min: *lo,
                        theta_max: *hi,
                        n: a.points,
                    }),
                    _ => bail!("--arc expects RADIUS or RADIUS,THETA_MIN,THETA_MAX"),
                }
            } else if let Some(s) = &a.rect {
                match input::reals(s)?.as_slice() {
                    [re_min, re_max, im_min, im_max] => Region::Rect(Rect {
                        re_min: *re_min,
                        re_max: *re_max,
                        im_min: *im_min,
                        im_max: *im_max,
                        nx: a.nx,
                        ny: a.ny,
                    }),
                    _ => bail!("--rect expects RE_MIN,RE_MAX,IM_MIN,IM_MAX"),
                }
            } else {
                Region::Rect(Rect {
                    nx: a.nx,
                    ny: a.ny,
                    ..Rect::standard(a.function.p)
                })
            };
            let report = pick_scan(&f, &region, cli.tol.unwrap_or(config::PICK_TOL))?;
            let bad = !report.is_pick();
            Ok(Output::of(&report)?.violated_if(bad))
        }
        Command::AtomMass(a) => {
            let f = a.function.build()?;
            let m = match a.side {
                Side::Left => atom_mass_left(&f, &left_sequence(a.count))?,
                Side::Right => {
                    let tau = match (a.tau, a.function.kind) {
                        (Some(t), _) => t,
                        (None, FunctionKind::Series) => bail!("--function series needs --tau"),
                        (None, _) => tau_f64(a.function.p),
                    };
                    atom_mass_right(&f, tau, &right_sequence(tau, a.count))?
                }
            };
            Output::of(&m)
        }
        Command::DensityMoment(a) => {
            let q = density_moment_with_error(&a.density.spec()?, a.n, a.density.n_quad)?;
            Output::of(&json!({ "n": a.n, "value": q.value, "error": q.error }))
        }
        Command::W2(a) => Output::of(&w2(a.t)?),
        Command::Wp(a) => Output::of(&w_p(a.p, a.t, cli.tol.unwrap_or(config::WP_TOL))?),
        Command::BinomIntegral(a) => {
            let q = binom_integral_with_error(a.r, a.k, a.n_quad)?;
            Output::of(&json!({ "r": a.r, "k": a.k, "value": q.value, "error": q.error }))
        }
        Command::Reconstruct(a) => {
            let c = ctx.seq(&a.seq)?;
            let tau = ctx.scalar(&a.tau, "tau")?;
            match reconstruct_cdf(&c, a.n.unwrap_or(c.order()), &tau) {
                Ok(est) => {
                    let csv = est.to_csv();
                    Ok(Output::of(&est)?.with_csv(csv))
                }
                Err(Error::NegativeArrayEntry {
                    order,
                    row,
                    index,
                    value,
                }) => Ok(Output::of(&json!({
                    "violation": "negative_array_entry",
                    "order": order,
                    "row": row,
                    "index": index,
                    "value": value,
                }))?
                .violated_if(true)),
                Err(e) => Err(e.into()),
            }
        }
        Command::Spectra(a) => {
            let report = sample_product_moments(&SpectraConfig {
                m: a.m,
                size: a.size,
                n_max: a.n_max,
                trials: a.trials,
                seed: a.seed,
            })?;
            let mut out = Output::of(&report)?;
            out.csv = Some(Output::of(&report.moments)?.render(crate::output::Format::Csv));
            if let Some(rel) = a.check {
                let cmp = compare_to_fc(&report.moments, rel);
                if !cmp.passed() {
                    eprintln!("{}", serde_json::to_string(&cmp)?);
                }
                out = out.violated_if(!cmp.passed());
            }
            Ok(out)
        }
        Command::Diff(a) => Output::of(&finite_difference(&ctx.seq(&a.seq)?, a.k, a.j)?),
        Command::Array(a) => Output::of(&diaconis_freedman_array(&ctx.seq(&a.seq)?, a.n)?),
        Command::Convolve(a) => {
            Output::sequence(&convolve(&ctx.seq(&a.seq)?, &a.other.load(ctx.kind)?))
        }
        Command::Compose(a) => {
            let (b, c) = (ctx.seq(&a.seq)?, a.other.load(ctx.kind)?);
            if let Some(bound) = compose_truncation_bound(&b, &c) {
                eprintln!("warning: c_0 != 0; truncation error bound {bound:e}");
            }
            Output::sequence(&compound_compose(&b, &c))
        }
        Command::Tau(a) => Output::of(&tau(&ctx.scalar(&a.p, "p")?)?),
        Command::FcIdentity(a) => {
            let (lhs, rhs) = fc_alternating_identity(&ctx.scalar(&a.p, "p")?, a.n)?;
            let ok = ctx.agree(&lhs, &rhs);
            Ok(Output::of(&json!({ "lhs": lhs, "rhs": rhs, "equal": ok }))?.violated_if(!ok))
        }
        Command::BnCheck(a) => {
            let (lhs, rhs) = bn_alternating_crosscheck(&ctx.seq(&a.seq)?, a.n)?;
            let ok = ctx.agree(&lhs, &rhs);
            Ok(Output::of(&json!({ "lhs": lhs, "rhs": rhs, "equal": ok }))?.violated_if(!ok))
        }
        Command::ExpIdentity(a) => {
            let defect = series_exp_identity(&ctx.seq(&a.seq)?)?;
            let ok = ctx.agree(&defect, &Scalar::zero().with_kind(defect.kind())?);
            Ok(Output::of(&json!({ "max_abs_defect": defect }))?.violated_if(!ok))
        }
        Command::RootCheck(a) => {
            let c = ctx.seq(&a.seq)?;
            let back = convolution_root_check(&c, a.n)?;
            let ok = back
                .terms()
                .iter()
                .zip(c.terms())
                .all(|(x, y)| ctx.agree(x, y));
            Ok(Output::of(&json!({ "n": a.n, "power": back, "matches": ok }))?.violated_if(!ok))
        }
        Command::DensityBound(a) => {
            let c = ctx.seq(&a.seq)?;
            Output::of(&canonical_density_bound(&c, &ctx.scalar(&a.tau, "tau")?)?)
        }
        Command::DensityCdf(a) => {
            Output::of(&density_cdf(&a.density.spec()?, a.x, a.density.n_quad)?)
        }
        Command::Fp(a) => Output::of(&f_p(a.p, a.u)?),
        Command::MpDensity(a) => Output::of(&mp_density(a.t)?),
        Command::Psi(a) => Output::of(&point(psi(a.p, C64::new(a.c.0, a.c.1))?)),
        Command::Config => Output::of(&json!({
            "float_tol_scale": config::FLOAT_TOL_SCALE,
            "normalization_tol": config::NORMALIZATION_TOL,
            "tail_tol": config::TAIL_TOL,
            "genfun_tol": config::GENFUN_TOL,
            "newton_max_iter": config::NEWTON_MAX_ITER,
            "min_step": config::MIN_STEP,
            "detour_radius": config::DETOUR_RADIUS,
            "pick_tol": config::PICK_TOL,
            "scan_resolution": config::SCAN_RESOLUTION,
            "series_radius_fraction": config::SERIES_RADIUS_FRACTION,
            "n_quad": config::N_QUAD,
            "panel_order": config::PANEL_ORDER,
            "wp_tol": config::WP_TOL,
            "spectra_max_moment": config::SPECTRA_MAX_MOMENT,
            "precision_env": config::PRECISION_ENV,
        })),
    }
}
