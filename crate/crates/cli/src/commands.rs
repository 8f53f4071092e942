use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use scorelab::categorical::{
    self, cos_angle, expected_ls_gap, expected_ls_gap_derivative, expected_score, gamma_star,
    h_indifference, pair_entropies, CategoricalOutcome,
};
use scorelab::continuous::{
    expected_ls_gap_density, expected_score_density, h_functional_density, mse_criterion,
    DensityForecastPair, DensityScorer,
};
use scorelab::estimate::{min_score_fit, rank_models, FitConfig, ModelForecasts, Outcomes};
use scorelab::perturb::{max_feasible_epsilon, PerturbationSpec};
use scorelab::verify::{
    gamma_star_density, verify_binary, verify_density, Summary, SweepConfig, Verdict, SKEWNESS_NOTE,
};
use scorelab::{
    entropy_categorical, entropy_density, Grid, GridDensity, GridFunction, ProbVector, Rule,
    ScoreReport,
};

use crate::error::{CliError, CliResult};
use crate::input::{
    is_inline_list, looks_like_json, parse_prob_list, read_categorical_forecasts,
    read_categorical_outcomes, read_density_forecasts, read_reals,
};
use crate::report::{fmt9, num, to_value, Report, RunManifest, Table};
use crate::{
    Cli, Command, EntropyArgs, EstimateArgs, ExpectedArgs, Format, GammaStarArgs, MixtureArgs,
    RankArgs, ScoreArgs, Suite, VerifyArgs,
};

/// What a command produced, before formatting.
struct Output {
    inputs: Vec<PathBuf>,
    notes: Vec<String>,
    summary: Value,
    records: Vec<Value>,
    tables: Vec<Table>,
    warnings: Vec<String>,
    exit: i32,
}

impl Output {
    fn new(summary: Value, records: Vec<Value>, table: Table) -> Self {
        Self {
            inputs: Vec::new(),
            notes: Vec::new(),
            summary,
            records,
            tables: vec![table],
            warnings: Vec::new(),
            exit: 0,
        }
    }

    fn inputs(mut self, inputs: &[&Path]) -> Self {
        self.inputs = inputs.iter().map(|p| p.to_path_buf()).collect();
        self
    }
}

pub(crate) fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let (name, options, result) = match &cli.command {
        Command::Score(a) => ("score", to_value(a)?, score(a)),
        Command::Rank(a) => ("rank", to_value(a)?, rank(a)),
        Command::Expected(a) => ("expected", to_value(a)?, expected(a)),
        Command::Verify(a) => ("verify", to_value(a)?, verify(a, cli.seed)),
        Command::GammaStar(a) => ("gamma-star", to_value(a)?, gamma_star_cmd(a)),
        Command::Estimate(a) => ("estimate", to_value(a)?, estimate(a, cli.seed)),
        Command::Entropy(a) => ("entropy", to_value(a)?, entropy(a)),
    };
    let output = result?;
    let mut options = options;
    if let Value::Object(map) = &mut options {
        map.insert("format".into(), to_value(&cli.format)?);
    }
    let manifest = RunManifest::new(name, options, &output.inputs, cli.seed)?;
    let report = Report {
        manifest,
        notes: output.notes.clone(),
        summary: output.summary.clone(),
        records: output.records.clone(),
    };

    for w in &output.warnings {
        writeln!(err, "warning: {w}")?;
    }
    match cli.format {
        Format::Table => {
            for note in &output.notes {
                writeln!(out, "# {note}")?;
            }
            for (i, t) in output.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                t.write(out)?;
            }
        }
        Format::Records => {
            for r in &report.records {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
            writeln!(
                out,
                "{}",
                serde_json::to_string(&json!({ "summary": report.summary }))?
            )?;
        }
    }
    if let Some(path) = &cli.report {
        report.write(path)?;
    }
    Ok(output.exit)
}

fn score(a: &ScoreArgs) -> CliResult<Output> {
    let forecasts_name = a.forecasts.display().to_string();
    let outcomes_name = a.outcomes.display().to_string();
    let mut records = Vec::new();
    let mut table = Table::new(&["case", "line", "outcome", "score"]);
    let scores: Vec<f64> = if looks_like_json(&a.forecasts)? {
        if !a.rule.is_density() {
            return Err(scorelab::Error::UnsupportedRule {
                rule: a.rule.to_string(),
                target: "density forecasts",
            }
            .into());
        }
        let fs = read_density_forecasts(&a.forecasts)?;
        let xs = read_reals(&a.outcomes)?;
        check_counts(fs.len(), xs.len(), &forecasts_name, &outcomes_name)?;
        let shared = if fs.len() == 1 {
            Some(DensityScorer::new(a.rule, &fs[0])?)
        } else {
            None
        };
        let mut scores = Vec::with_capacity(xs.len());
        for (i, (&x, &line)) in xs.values.iter().zip(&xs.lines).enumerate() {
            let s = match &shared {
                Some(sc) => sc.score(x),
                None => DensityScorer::new(a.rule, &fs[i])?.score(x),
            }
            .map_err(|e| CliError::from(e).context(format!("{outcomes_name} line {line}")))?;
            records.push(json!({"case": i + 1, "line": line, "outcome": x, "score": num(s)}));
            table.row(vec![
                (i + 1).to_string(),
                line.to_string(),
                fmt9(x),
                fmt9(s),
            ]);
            scores.push(s);
        }
        scores
    } else {
        if !a.rule.is_categorical() {
            return Err(scorelab::Error::UnsupportedRule {
                rule: a.rule.to_string(),
                target: "categorical forecasts",
            }
            .into());
        }
        let fs = read_categorical_forecasts(&a.forecasts)?;
        let js = read_categorical_outcomes(&a.outcomes)?;
        check_counts(fs.len(), js.len(), &forecasts_name, &outcomes_name)?;
        let mut scores = Vec::with_capacity(js.len());
        for (i, (&j, &line)) in js.values.iter().zip(&js.lines).enumerate() {
            let f = &fs.values[if fs.len() == 1 { 0 } else { i }];
            let outcome = CategoricalOutcome::new(j, f.len())
                .map_err(|e| CliError::from(e).context(format!("{outcomes_name} line {line}")))?;
            let s = categorical::score(a.rule, f, outcome)?;
            records.push(json!({"case": i + 1, "line": line, "outcome": j, "score": num(s)}));
            table.row(vec![
                (i + 1).to_string(),
                line.to_string(),
                j.to_string(),
                fmt9(s),
            ]);
            scores.push(s);
        }
        scores
    };
    let report = ScoreReport::new(a.rule, scores);
    let infinite = report.scores.iter().filter(|s| s.is_infinite()).count();
    table.row(vec![
        "mean".into(),
        String::new(),
        String::new(),
        fmt9(report.mean),
    ]);
    let mut output = Output::new(
        json!({
            "rule": a.rule,
            "mean": num(report.mean),
            "count": report.count,
            "infinite_cases": infinite,
        }),
        records,
        table,
    )
    .inputs(&[&a.forecasts, &a.outcomes]);
    if infinite > 0 {
        output.warnings.push(format!(
            "{infinite} case(s) scored infinite: an outcome with zero forecast probability materialized; mean is infinite"
        ));
    }
    Ok(output)
}

fn check_counts(forecasts: usize, outcomes: usize, fname: &str, oname: &str) -> CliResult<()> {
    if forecasts != 1 && forecasts != outcomes {
        return Err(CliError::Validation(format!(
            "{fname} has {forecasts} forecasts but {oname} has {outcomes} outcomes"
        )));
    }
    Ok(())
}

fn rank(a: &RankArgs) -> CliResult<Output> {
    let density = looks_like_json(&a.forecasts[0])?;
    let mut models = Vec::with_capacity(a.forecasts.len());
    for (k, path) in a.forecasts.iter().enumerate() {
        if looks_like_json(path)? != density {
            return Err(CliError::Validation(format!(
                "{}: all models must be of the same kind as {}",
                path.display(),
                a.forecasts[0].display()
            )));
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("model{}", k + 1));
        let name = if a.forecasts[..k]
            .iter()
            .any(|p| p.file_stem() == path.file_stem())
        {
            format!("{stem}#{}", k + 1)
        } else {
            stem
        };
        let forecasts = if density {
            ModelForecasts::Density(read_density_forecasts(path)?)
        } else {
            ModelForecasts::Categorical(read_categorical_forecasts(path)?.values)
        };
        models.push((name, forecasts));
    }
    let outcomes = if density {
        Outcomes::Density(read_reals(&a.outcomes)?.values)
    } else {
        let js = read_categorical_outcomes(&a.outcomes)?;
        let m = match &models[0].1 {
            ModelForecasts::Categorical(fs) => fs[0].len(),
            ModelForecasts::Density(_) => unreachable!(),
        };
        let mut outs = Vec::with_capacity(js.len());
        for (&j, &line) in js.values.iter().zip(&js.lines) {
            outs.push(CategoricalOutcome::new(j, m).map_err(|e| {
                CliError::from(e).context(format!("{} line {line}", a.outcomes.display()))
            })?);
        }
        Outcomes::Categorical(outs)
    };
    let ranking = rank_models(&models, &outcomes, a.rule)?;
    let mut table = Table::new(&["rank", "model", "mean", "cases"]);
    let mut records = Vec::new();
    for m in &ranking.models {
        table.row(vec![
            m.rank.to_string(),
            m.name.clone(),
            fmt9(m.report.mean),
            m.report.count.to_string(),
        ]);
        records.push(json!({
            "rank": m.rank,
            "model": m.name,
            "mean": num(m.report.mean),
            "count": m.report.count,
        }));
    }
    let mut inputs: Vec<&Path> = a.forecasts.iter().map(|p| p.as_path()).collect();
    inputs.push(&a.outcomes);
    let mut output = Output::new(
        json!({
            "rule": a.rule,
            "excluded_cases": ranking.excluded_cases,
            "case_errors": to_value(&ranking.case_errors)?,
        }),
        records,
        table,
    )
    .inputs(&inputs);
    for e in &ranking.case_errors {
        output
            .warnings
            .push(format!("model {} case {}: {}", e.model, e.case, e.message));
    }
    Ok(output)
}

enum Dist {
    Categorical(ProbVector),
    Density(GridDensity),
}

fn load_dist(spec: &str, inputs: &mut Vec<PathBuf>) -> CliResult<Dist> {
    if is_inline_list(spec) {
        return Ok(Dist::Categorical(parse_prob_list(spec)?));
    }
    let path = PathBuf::from(spec);
    inputs.push(path.clone());
    if looks_like_json(&path)? {
        let mut fs = read_density_forecasts(&path)?;
        if fs.len() != 1 {
            return Err(CliError::Validation(format!(
                "{spec}: expected a single density"
            )));
        }
        Ok(Dist::Density(fs.remove(0)))
    } else {
        let mut fs = read_categorical_forecasts(&path)?;
        if fs.len() != 1 {
            return Err(CliError::Validation(format!(
                "{spec}: expected a single forecast row"
            )));
        }
        Ok(Dist::Categorical(fs.values.remove(0)))
    }
}

fn selected(rule: Option<Rule>, all: &[Rule], kind: &'static str) -> CliResult<Vec<Rule>> {
    match rule {
        Some(r) if all.contains(&r) => Ok(vec![r]),
        Some(r) => Err(scorelab::Error::UnsupportedRule {
            rule: r.to_string(),
            target: kind,
        }
        .into()),
        None => Ok(all.to_vec()),
    }
}

fn parse_mixture(text: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Validation(format!("--mixture expects `w,mu`, got `{text}`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let w = parts[0].parse::<f64>().map_err(|_| bad())?;
    let mu = parts[1].parse::<f64>().map_err(|_| bad())?;
    Ok((w, mu))
}

struct DensitySetup {
    weight: f64,
    mu: f64,
    spec: PerturbationSpec,
    epsilon_max: f64,
    pair: DensityForecastPair,
    spec_path: PathBuf,
}

fn density_setup(m: &MixtureArgs) -> CliResult<Option<DensitySetup>> {
    let (mixture, path) = match (&m.mixture, &m.perturbation) {
        (None, None) => return Ok(None),
        (Some(x), Some(p)) => (x, p),
        _ => {
            return Err(CliError::Validation(
                "--mixture and --perturbation must be given together".into(),
            ))
        }
    };
    let (weight, mu) = parse_mixture(mixture)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let spec =
        PerturbationSpec::from_kv(&text).map_err(|e| CliError::from(e).context(path.display()))?;
    let grid = Grid::symmetric(m.half_width, m.grid_points)?;
    let target = GridDensity::skewed_mixture(grid, weight, mu)?;
    let epsilon_max = max_feasible_epsilon(&spec.shape, &target)?;
    let gamma = spec.build(&target)?;
    let pair = DensityForecastPair::new(target, gamma)?;
    Ok(Some(DensitySetup {
        weight,
        mu,
        spec,
        epsilon_max,
        pair,
        spec_path: path.clone(),
    }))
}

fn pair_rows(rows: &[(Rule, f64, f64)]) -> (Vec<Value>, Table) {
    let mut table = Table::new(&["rule", "plus", "minus", "plus - minus"]);
    let mut records = Vec::new();
    for &(rule, plus, minus) in rows {
        table.row(vec![
            rule.to_string(),
            fmt9(plus),
            fmt9(minus),
            fmt9(plus - minus),
        ]);
        records.push(json!({
            "rule": rule,
            "plus": num(plus),
            "minus": num(minus),
            "gap": num(plus - minus),
        }));
    }
    (records, table)
}

fn kv_table(pairs: &[(&str, String)]) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in pairs {
        t.row(vec![k.to_string(), v.clone()]);
    }
    t
}

fn expected(a: &ExpectedArgs) -> CliResult<Output> {
    let modes = [
        a.forecast.is_some(),
        a.p.is_some(),
        a.density.mixture.is_some(),
    ];
    if modes.iter().filter(|m| **m).count() != 1 {
        return Err(CliError::Validation(
            "give exactly one of --forecast/--target, --p/--gamma or --mixture/--perturbation"
                .into(),
        ));
    }
    if let (Some(f), Some(t)) = (&a.forecast, &a.target) {
        let mut inputs = Vec::new();
        let forecast = load_dist(f, &mut inputs)?;
        let target = load_dist(t, &mut inputs)?;
        let rows: Vec<(Rule, f64)> = match (&forecast, &target) {
            (Dist::Categorical(f), Dist::Categorical(p)) => {
                selected(a.rule, &Rule::CATEGORICAL, "categorical forecasts")?
                    .into_iter()
                    .map(|r| Ok((r, expected_score(r, f, p)?)))
                    .collect::<CliResult<_>>()?
            }
            (Dist::Density(f), Dist::Density(p)) => {
                selected(a.rule, &Rule::DENSITY, "density forecasts")?
                    .into_iter()
                    .map(|r| Ok((r, expected_score_density(r, f, p)?)))
                    .collect::<CliResult<_>>()?
            }
            _ => {
                return Err(CliError::Validation(
                    "forecast and target must both be categorical or both densities".into(),
                ))
            }
        };
        let mut table = Table::new(&["rule", "expected score"]);
        let mut records = Vec::new();
        for (r, v) in &rows {
            table.row(vec![r.to_string(), fmt9(*v)]);
            records.push(json!({"rule": r, "expected_score": num(*v)}));
        }
        let paths: Vec<&Path> = inputs.iter().map(|p| p.as_path()).collect();
        return Ok(Output::new(json!({"rules": rows.len()}), records, table).inputs(&paths));
    }

    if let (Some(p), Some(gamma)) = (a.p, a.gamma) {
        let (plus, minus) = scorelab::perturb::make_binary_pair(p, gamma)?;
        let target = ProbVector::binary(p)?;
        let rows = selected(a.rule, &Rule::CATEGORICAL, "categorical forecasts")?
            .into_iter()
            .map(|r| {
                Ok((
                    r,
                    expected_score(r, &plus, &target)?,
                    expected_score(r, &minus, &target)?,
                ))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let (records, table) = pair_rows(&rows);
        let (h_plus, h_minus) = pair_entropies(p, gamma)?;
        let mut summary = json!({
            "p": p,
            "gamma": gamma,
            "entropy_plus": h_plus,
            "entropy_minus": h_minus,
            "cos_plus": cos_angle(p, gamma)?,
            "cos_minus": cos_angle(p, -gamma)?,
        });
        let mut extra = vec![
            ("entropy plus", fmt9(h_plus)),
            ("entropy minus", fmt9(h_minus)),
        ];
        if gamma > 0.0 {
            let gap = expected_ls_gap(p, gamma)?;
            let d = expected_ls_gap_derivative(p, gamma)?;
            summary["ls_gap_closed_form"] = num(gap);
            summary["ls_gap_derivative"] = num(d);
            extra.push(("ls gap (closed form)", fmt9(gap)));
            extra.push(("d(ls gap)/d(gamma)", fmt9(d)));
        }
        let mut output = Output::new(summary, records, table);
        output.tables.push(kv_table(&extra));
        return Ok(output);
    }

    let setup = density_setup(&a.density)?
        .ok_or_else(|| CliError::Validation("--mixture requires --perturbation".into()))?;
    let pair = &setup.pair;
    let rows = selected(a.rule, &Rule::DENSITY, "density forecasts")?
        .into_iter()
        .map(|r| {
            Ok((
                r,
                expected_score_density(r, pair.plus(), pair.target())?,
                expected_score_density(r, pair.minus(), pair.target())?,
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let (records, table) = pair_rows(&rows);
    let ls_gap = expected_ls_gap_density(pair);
    let (h_plus, h_minus) = (entropy_density(pair.plus()), entropy_density(pair.minus()));
    let (mse_plus, mse_minus) = (mse_criterion(pair, 1.0)?, mse_criterion(pair, -1.0)?);
    let summary = json!({
        "weight": setup.weight,
        "mu": setup.mu,
        "shape": setup.spec.shape,
        "epsilon": setup.spec.epsilon,
        "epsilon_max": setup.epsilon_max,
        "ls_gap": num(ls_gap),
        "entropy_plus": h_plus,
        "entropy_minus": h_minus,
        "mse_plus": mse_plus,
        "mse_minus": mse_minus,
    });
    let mut output = Output::new(summary, records, table).inputs(&[&setup.spec_path]);
    output.notes.push(SKEWNESS_NOTE.to_string());
    output.tables.push(kv_table(&[
        (
            "epsilon / epsilon_max",
            fmt9(setup.spec.epsilon / setup.epsilon_max),
        ),
        ("ls gap", fmt9(ls_gap)),
        ("entropy plus", fmt9(h_plus)),
        ("entropy minus", fmt9(h_minus)),
        ("mse plus", fmt9(mse_plus)),
        ("mse minus", fmt9(mse_minus)),
    ]));
    Ok(output)
}

fn verify(a: &VerifyArgs, seed: u64) -> CliResult<Output> {
    let mut config = match a.suite {
        Suite::Binary => SweepConfig::binary_default(),
        Suite::Density => SweepConfig::density_default(),
    };
    if let Some(steps) = a.grid_steps {
        config.steps = steps;
    }
    if let Some(t) = a.tolerance {
        config.tolerance = t;
    }
    config.seed = seed;
    config.refinement_check = !a.no_refine;
    let mut notes = vec![
        "strict inequalities hold at margin >= 10 tol, are violated below -tol, indifferent between"
            .to_string(),
    ];
    let (cases, quadrature_failure, flipped) = match a.suite {
        Suite::Binary => (verify_binary(&config)?, false, Vec::new()),
        Suite::Density => {
            notes.push(SKEWNESS_NOTE.to_string());
            let out = verify_density(&config)?;
            (out.cases, out.quadrature_failure, out.flipped)
        }
    };
    let summary = Summary::of(&cases);
    let mut table = Table::new(&[
        "proposition",
        "holds",
        "indifferent",
        "out-of-hypothesis",
        "violated",
        "min margin",
    ]);
    for (prop, counts) in &summary.by_proposition {
        let count = |v| counts.get(&v).copied().unwrap_or(0).to_string();
        let min_margin = cases
            .iter()
            .filter(|c| &c.proposition == prop)
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min);
        table.row(vec![
            prop.clone(),
            count(Verdict::Holds),
            count(Verdict::Indifferent),
            count(Verdict::OutOfHypothesis),
            count(Verdict::Violated),
            fmt9(min_margin),
        ]);
    }
    let mut totals = Table::new(&[
        "cases",
        "holds",
        "indifferent",
        "out-of-hypothesis",
        "violated",
    ]);
    totals.row(vec![
        summary.total.to_string(),
        summary.holds.to_string(),
        summary.indifferent.to_string(),
        summary.out_of_hypothesis.to_string(),
        summary.violated.to_string(),
    ]);
    let records = cases.iter().map(to_value).collect::<CliResult<Vec<_>>>()?;
    let mut summary_value = to_value(&summary)?;
    summary_value["suite"] = to_value(&a.suite)?;
    summary_value["config"] = to_value(&config)?;
    summary_value["quadrature_failure"] = Value::from(quadrature_failure);
    summary_value["flipped_cases"] = to_value(&flipped)?;
    let mut output = Output::new(summary_value, records, table);
    output.tables.push(totals);
    output.notes = notes;
    if quadrature_failure {
        output.warnings.push(format!(
            "refined grid changed {} verdict(s); quadrature not converged",
            flipped.len()
        ));
        output.exit = 2;
    } else if summary.violated > 0 {
        output
            .warnings
            .push(format!("{} violated verdict(s)", summary.violated));
        output.exit = 2;
    }
    Ok(output)
}

fn gamma_star_cmd(a: &GammaStarArgs) -> CliResult<Output> {
    if let (Some(p), Some(g2)) = (a.p, a.gamma2) {
        if a.density.mixture.is_some() {
            return Err(CliError::Validation(
                "give either --p/--gamma2 or --mixture/--perturbation".into(),
            ));
        }
        let root = gamma_star(p, g2, a.tol)?;
        let residual = h_indifference(p, root, g2)?;
        let below = h_indifference(p, 0.5 * root, g2)?;
        let above = h_indifference(p, 0.5 * (root + g2), g2)?;
        let summary = json!({
            "p": p,
            "gamma2": g2,
            "gamma_star": root,
            "residual": residual,
            "h_below": below,
            "h_above": above,
        });
        let table = kv_table(&[
            ("gamma*", fmt9(root)),
            ("H(gamma*, gamma2)", fmt9(residual)),
            ("H(gamma*/2, gamma2)", fmt9(below)),
            ("H((gamma*+gamma2)/2, gamma2)", fmt9(above)),
        ]);
        return Ok(Output::new(summary.clone(), vec![summary], table));
    }
    let setup = density_setup(&a.density)?.ok_or_else(|| {
        CliError::Validation("give --p and --gamma2, or --mixture and --perturbation".into())
    })?;
    let target = setup.pair.target();
    let g2 = setup.pair.perturbation();
    let c = gamma_star_density(target, g2, a.tol)?;
    let h = |s: f64| h_functional_density(target, &g2.scaled(s), g2);
    let residual = h(c)?;
    let (lo, hi) = ((c - 0.05).max(0.5 * c), (c + 0.05).min(0.5 * (1.0 + c)));
    let (h_lo, h_hi) = (h(lo)?, h(hi)?);
    let summary = json!({
        "weight": setup.weight,
        "mu": setup.mu,
        "shape": setup.spec.shape,
        "epsilon": setup.spec.epsilon,
        "c_star": c,
        "residual": residual,
        "c_below": lo,
        "h_below": h_lo,
        "c_above": hi,
        "h_above": h_hi,
    });
    let table = kv_table(&[
        ("c*", fmt9(c)),
        ("H(c* gamma2, gamma2)", fmt9(residual)),
        ("H below", fmt9(h_lo)),
        ("H above", fmt9(h_hi)),
    ]);
    let mut output = Output::new(summary.clone(), vec![summary], table).inputs(&[&setup.spec_path]);
    output.notes.push(SKEWNESS_NOTE.to_string());
    Ok(output)
}

fn estimate(a: &EstimateArgs, seed: u64) -> CliResult<Output> {
    let samples = read_reals(&a.samples)?;
    let config = FitConfig {
        restarts: a.restarts,
        grid_points: a.grid_points,
        seed,
        ..FitConfig::default()
    };
    let fit = min_score_fit(&samples.values, a.family, a.rule, &config)
        .map_err(|e| CliError::from(e).context(a.samples.display()))?;
    let n = samples.len() as f64;
    let mean = samples.values.iter().sum::<f64>() / n;
    let sd = (samples
        .values
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / n)
        .sqrt();
    let mut table = Table::new(&["parameter", "value"]);
    let mut records = Vec::new();
    for (name, v) in a.family.parameter_names().iter().zip(&fit.parameters) {
        table.row(vec![name.to_string(), fmt9(*v)]);
        records.push(json!({"parameter": name, "value": v}));
    }
    let stats = kv_table(&[
        ("mean score", fmt9(fit.mean_score)),
        ("initial score", fmt9(fit.initial_score)),
        ("iterations", fit.iterations.to_string()),
        ("converged", fit.converged.to_string()),
        ("sample mean", fmt9(mean)),
        ("sample sd (biased)", fmt9(sd)),
    ]);
    let mut summary = to_value(&fit)?;
    summary["mean_score"] = num(fit.mean_score);
    summary["initial_score"] = num(fit.initial_score);
    summary["sample_mean"] = num(mean);
    summary["sample_sd"] = num(sd);
    summary["samples"] = Value::from(samples.len());
    let mut output = Output::new(summary, records, table).inputs(&[&a.samples]);
    output.tables.push(stats);
    if !fit.converged {
        output
            .warnings
            .push("no restart converged; reporting the best point found".into());
        output.exit = 2;
    }
    Ok(output)
}

fn entropy(a: &EntropyArgs) -> CliResult<Output> {
    let mut table = Table::new(&["distribution", "entropy"]);
    let mut records = Vec::new();
    let mut inputs = Vec::new();
    match (&a.dist, &a.density) {
        (Some(d), None) => {
            let f = parse_prob_list(d)?;
            let h = entropy_categorical(&f);
            table.row(vec![d.clone(), fmt9(h)]);
            records.push(json!({"distribution": d, "entropy": h}));
        }
        (None, Some(path)) => {
            let fs = read_density_forecasts(path)?;
            for (i, f) in fs.iter().enumerate() {
                let h = entropy_density(f);
                table.row(vec![format!("density {}", i + 1), fmt9(h)]);
                records.push(json!({"index": i + 1, "points": f.grid().len(), "entropy": h}));
            }
            inputs.push(path.as_path());
        }
        _ => {
            return Err(CliError::Validation(
                "give exactly one of --dist or --density".into(),
            ));
        }
    }
    let summary = json!({"count": records.len(), "units": "nats"});
    Ok(Output::new(summary, records, table).inputs(&inputs))
}
