use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use semrd::bn::{
    conditional_partition, enumerate_joint, load_network, marginal, sample, BayesNet, JointTable, SizeGuard,
};
use semrd::bounds::{default_target_grid, lemma1_bounds, lemma2_check};
use semrd::codec::{
    build_factorized_codebooks, build_joint_huffman, complexity_report, decode, encode, joint_expected_length,
    Bitstream, JointBuild,
};
use semrd::info::{
    conditional_mutual_information, entropy, joint_entropy_bruteforce, joint_entropy_factorized,
    node_conditional_entropy, parent_information_sum, redundancy_gap,
};
use semrd::rd::{
    binary_conditional_rd, gaussian_conditional_rd, rd_curve, DistortionKind, DistortionSpec, RdProblem, SweepGrid,
};
use semrd::Error;

use crate::args::{ClosedForm, Command, DistortionArg, RdArgs};
use crate::config::{usage, RunConfig};
use crate::output::{num, Csv};

const CHECK_TOL: f64 = 1e-9;

pub fn run(cfg: RunConfig) -> Result<()> {
    let RunConfig {
        command,
        opts,
        guard,
        exec,
    } = cfg;
    match command {
        Command::Verify { net } => verify(&net, guard),
        Command::Entropy { net, csv } => entropy_cmd(&net, csv, guard),
        Command::Encode { net, samples, output } => {
            let net = load(&net)?;
            let vectors = read_samples(&samples, &net)?;
            let fcb = build_factorized_codebooks(&net)?;
            let stream = encode(&fcb, &vectors, exec)?;
            let bytes = stream.to_bytes();
            fs::write(&output, &bytes).with_context(|| format!("writing {}", output.display()))?;
            let payload_bits = 8 * stream.payload.len();
            println!(
                "encoded {} vectors into {} bytes ({} payload bytes, {} bits/vector)",
                stream.count,
                bytes.len(),
                stream.payload.len(),
                if stream.count == 0 {
                    "0".into()
                } else {
                    num(payload_bits as f64 / stream.count as f64)
                }
            );
            Ok(())
        }
        Command::Decode { net, stream, output } => {
            let net = load(&net)?;
            let bytes = fs::read(&stream).with_context(|| format!("reading {}", stream.display()))?;
            let fcb = build_factorized_codebooks(&net)?;
            let parsed = Bitstream::from_bytes(&bytes).with_context(|| stream.display().to_string())?;
            let vectors = decode(&fcb, &parsed).with_context(|| stream.display().to_string())?;
            emit(output.as_deref(), &format_samples(&vectors))
        }
        Command::CodecReport { net, csv, timings } => codec_report(&net, csv, timings, guard),
        Command::Rd(args) => rd_cmd(args, false, &opts, guard),
        Command::RdCond(args) => rd_cmd(args, true, &opts, guard),
        Command::RdClosedForm { source } => {
            let v = match source {
                ClosedForm::Binary { p, d } => binary_conditional_rd(p, d),
                ClosedForm::Gaussian { sigma, r, d } => gaussian_conditional_rd(sigma, r, d),
            }
            .map_err(|e| usage(e.to_string()))?;
            println!("{}", num(v));
            Ok(())
        }
        Command::Bounds {
            net,
            targets,
            distortion,
            csv,
        } => {
            let net = load(&net)?;
            let d = spec(&net, distortion);
            let grid = if targets.is_empty() {
                default_target_grid(&net, &d, guard)?
            } else {
                parse_points(&targets, net.num_vars(), "--targets")?
            };
            let names: Vec<String> = (0..net.num_vars()).map(|v| format!("D_{}", name(&net, v))).collect();
            let mut table = Csv::new(
                &[
                    names,
                    [
                        "lower_bits",
                        "joint_bits",
                        "upper_bits",
                        "slack_lower",
                        "slack_upper",
                        "converged",
                        "holds",
                    ]
                    .map(String::from)
                    .to_vec(),
                ]
                .concat(),
            );
            let mut text = String::new();
            for t in &grid {
                let r = lemma1_bounds(&net, t, &d, &opts, guard)?;
                let mut row: Vec<String> = t.iter().map(|&x| num(x)).collect();
                row.extend([
                    num(r.lower.raw()),
                    num(r.joint.raw()),
                    num(r.upper.raw()),
                    num(r.slack_lower.raw()),
                    num(r.slack_upper.raw()),
                    r.converged().to_string(),
                    r.holds().to_string(),
                ]);
                table.row(&row);
                text.push_str(&format!("{r}\n\n"));
            }
            print!("{}", if csv { table.finish() } else { text });
            Ok(())
        }
        Command::Lemma2 {
            net,
            side,
            targets,
            distortion,
            csv,
        } => {
            let net = load(&net)?;
            let side = resolve_vars(&net, &side)?;
            let d = spec(&net, distortion);
            let sources: Vec<usize> = (0..net.num_vars()).filter(|v| !side.contains(v)).collect();
            let grid = parse_points(&targets, sources.len(), "--targets")?;
            let mut header: Vec<String> = sources.iter().map(|&v| format!("D_{}", name(&net, v))).collect();
            header.extend(
                [
                    "joint_conditional_bits",
                    "subset_sum_bits",
                    "difference",
                    "blocks",
                    "converged",
                    "agrees",
                ]
                .map(String::from),
            );
            let mut table = Csv::new(&header);
            let mut text = String::new();
            for t in &grid {
                let r = lemma2_check(&net, &side, t, &d, &opts, guard)?;
                let blocks: String = r
                    .blocks
                    .blocks
                    .iter()
                    .map(|b| format!("[{}]", b.iter().map(|&v| name(&net, v)).collect::<Vec<_>>().join(" ")))
                    .collect();
                let mut row: Vec<String> = t.iter().map(|&x| num(x)).collect();
                row.extend([
                    num(r.joint_conditional.raw()),
                    num(r.subset_sum.raw()),
                    num(r.difference()),
                    blocks,
                    r.converged().to_string(),
                    r.agrees().to_string(),
                ]);
                table.row(&row);
                text.push_str(&format!("targets: {}\n{r}\n\n", join_nums(t)));
            }
            print!("{}", if csv { table.finish() } else { text });
            Ok(())
        }
        Command::Sample { net, seed, n, output } => {
            let net = load(&net)?;
            emit(output.as_deref(), &format_samples(&sample(&net, seed, n, exec)))
        }
    }
}

fn load(path: &Path) -> Result<BayesNet> {
    load_network(path).with_context(|| path.display().to_string())
}

fn name(net: &BayesNet, v: usize) -> &str {
    &net.variable(v).name
}

fn spec(net: &BayesNet, d: DistortionArg) -> DistortionSpec {
    DistortionSpec::preset(
        net,
        match d {
            DistortionArg::Hamming => DistortionKind::Hamming,
            DistortionArg::Squared => DistortionKind::SquaredError,
        },
    )
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn join_nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

/// Comma-separated names or numeric ids.
fn resolve_vars(net: &BayesNet, list: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let id = net
            .var_by_name(item)
            .or_else(|| item.parse::<usize>().ok().filter(|&i| i < net.num_vars()))
            .ok_or_else(|| usage(format!("unknown variable '{item}'")))?;
        if out.contains(&id) {
            return Err(usage(format!("variable '{item}' listed twice")));
        }
        out.push(id);
    }
    if out.is_empty() {
        return Err(usage("empty variable list"));
    }
    Ok(out)
}

fn parse_points(raw: &[String], width: usize, flag: &str) -> Result<Vec<Vec<f64>>> {
    raw.iter()
        .map(|s| {
            let v = s
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| usage(format!("{flag}: '{x}' is not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if v.len() != width {
                return Err(usage(format!(
                    "{flag}: expected {width} values, got {} in '{s}'",
                    v.len()
                )));
            }
            Ok(v)
        })
        .collect()
}

fn read_samples(path: &PathBuf, net: &BayesNet) -> Result<Vec<Vec<usize>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let states = line
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        net.check_assignment(&states)
            .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        out.push(states);
    }
    Ok(out)
}

fn format_samples(vectors: &[Vec<usize>]) -> String {
    let mut s = String::new();
    for v in vectors {
        let line: Vec<String> = v.iter().map(usize::to_string).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

fn joint_if_allowed(net: &BayesNet, guard: SizeGuard) -> Result<Option<JointTable>> {
    match enumerate_joint(net, guard, semrd::par::Exec::Parallel) {
        Ok(t) => Ok(Some(t)),
        Err(Error::SizeGuard { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn verify(path: &Path, guard: SizeGuard) -> Result<()> {
    let net = load(path)?;
    let edges: usize = (0..net.num_vars()).map(|v| net.parents(v).len()).sum();
    println!("ok   valid network: {} variables, {} edges", net.num_vars(), edges);
    let mut failed = false;
    let mut check = |ok: bool, msg: String| {
        println!("{} {msg}", if ok { "ok  " } else { "FAIL" });
        failed |= !ok;
    };

    let hf = joint_entropy_factorized(&net)?.raw();
    let info = parent_information_sum(&net)?.raw();
    match joint_if_allowed(&net, guard)? {
        None => println!("skip joint enumeration exceeds the size guard ({})", guard.limit()),
        Some(table) => {
            let hb = joint_entropy_bruteforce(&table).raw();
            check(
                (hf - hb).abs() <= CHECK_TOL,
                format!("entropy: factorized {} vs enumerated {} bits", num(hf), num(hb)),
            );
            let gap = redundancy_gap(&net, guard)?.raw();
            check(
                gap >= -CHECK_TOL && (gap - info).abs() <= CHECK_TOL,
                format!(
                    "redundancy gap {} equals the parent information sum {}",
                    num(gap),
                    num(info)
                ),
            );
            let mut worst = 0.0f64;
            let mut splits = 0;
            for v in 0..net.num_vars() {
                let part = conditional_partition(&net, &[v])?;
                for (i, a) in part.blocks.iter().enumerate() {
                    for b in &part.blocks[i + 1..] {
                        splits += 1;
                        let cmi = conditional_mutual_information(&table, a, b, &[v])?.raw();
                        worst = worst.max(cmi.abs());
                    }
                }
            }
            check(
                worst <= CHECK_TOL,
                format!(
                    "partition: {splits} block pairs over single-variable side sets, max conditional MI {}",
                    num(worst)
                ),
            );
        }
    }
    if failed {
        bail!("{}: verification failed", path.display());
    }
    Ok(())
}

fn entropy_cmd(path: &Path, csv: bool, guard: SizeGuard) -> Result<()> {
    let net = load(path)?;
    let mut table = Csv::new(&["quantity", "variable", "bits"].map(String::from));
    let mut text = format!("{:<16} {:>16} {:>16}\n", "variable", "H(X|parents)", "H(X)");
    let mut marginal_sum = 0.0;
    for v in 0..net.num_vars() {
        let hc = node_conditional_entropy(&net, v)?.value();
        let hm = entropy(marginal(&net, &[v], guard)?.probs());
        marginal_sum += hm;
        text.push_str(&format!("{:<16} {:>16} {:>16}\n", name(&net, v), num(hc), num(hm)));
        table.row(&["conditional_entropy", name(&net, v), &num(hc)]);
        table.row(&["marginal_entropy", name(&net, v), &num(hm)]);
    }
    let h = joint_entropy_factorized(&net)?.value();
    text.push_str(&format!("joint entropy H(X_1..X_m)       {}\n", num(h)));
    text.push_str(&format!("sum of marginal entropies       {}\n", num(marginal_sum)));
    table.row(&["joint_entropy", "", &num(h)]);
    table.row(&["marginal_entropy_sum", "", &num(marginal_sum)]);
    match redundancy_gap(&net, guard) {
        Ok(gap) => {
            text.push_str(&format!("redundancy gap                  {}\n", num(gap.value())));
            table.row(&["redundancy_gap", "", &num(gap.value())]);
        }
        Err(Error::SizeGuard { .. }) => {
            text.push_str("redundancy gap                  skipped (size guard)\n");
        }
        Err(e) => return Err(e.into()),
    }
    print!("{}", if csv { table.finish() } else { text });
    Ok(())
}

fn codec_report(path: &Path, csv: bool, timings: bool, guard: SizeGuard) -> Result<()> {
    let net = load(path)?;
    let report = complexity_report(&net, guard)?;
    let fcb = build_factorized_codebooks(&net)?;
    let h = joint_entropy_factorized(&net)?.value();
    let lf = fcb.expected_length();
    let lj = match joint_if_allowed(&net, guard)? {
        Some(t) => Some(joint_expected_length(&build_joint_huffman(&t, guard)?, &t)),
        None => None,
    };

    let mut rows: Vec<(&str, String)> = vec![
        ("variables", report.vars.to_string()),
        ("max_cardinality", report.max_cardinality.to_string()),
        ("max_in_degree", report.max_in_degree.to_string()),
        ("joint_alphabet", report.joint_alphabet.to_string()),
        ("factorized_bound", report.factorized_bound.to_string()),
        ("conditional_codes", report.conditional_codes.to_string()),
        ("entries_touched", report.entries_touched.to_string()),
        ("joint_entropy_bits", num(h)),
        ("factorized_expected_bits", num(lf)),
        ("joint_expected_bits", lj.map(num).unwrap_or_else(|| "skipped".into())),
    ];
    if timings {
        let start = Instant::now();
        build_factorized_codebooks(&net)?;
        rows.push(("factorized_build_us", start.elapsed().as_micros().to_string()));
        rows.push((
            "joint_build_us",
            match &report.joint_build {
                JointBuild::Built { elapsed } => elapsed.as_micros().to_string(),
                JointBuild::Skipped { .. } => "skipped".into(),
            },
        ));
    }
    if csv {
        let mut table = Csv::new(&["metric", "value"].map(String::from));
        for (k, v) in &rows {
            table.row(&[*k, v.as_str()]);
        }
        print!("{}", table.finish());
    } else {
        for (k, v) in &rows {
            println!("{k:<26}{v}");
        }
        if let JointBuild::Skipped { reason } = &report.joint_build {
            println!("joint codebook {reason}");
        }
        println!("per-code lengths (variable, parent config, H, expected length):");
        for (v, c, hc, l) in fcb.conditional_lengths() {
            println!("  {} {c} {} {}", name(&net, v), num(hc), num(l));
        }
    }
    Ok(())
}

fn rd_cmd(args: RdArgs, conditional: bool, opts: &semrd::rd::RdOptions, guard: SizeGuard) -> Result<()> {
    let net = load(&args.net)?;
    let side = match (&args.side, conditional) {
        (Some(s), true) => resolve_vars(&net, s)?,
        (None, true) => return Err(usage("rd-cond requires --side")),
        (Some(_), false) => return Err(usage("rd takes no --side; use rd-cond")),
        (None, false) => Vec::new(),
    };
    let vars = match &args.vars {
        Some(list) => resolve_vars(&net, list)?,
        None => (0..net.num_vars()).filter(|v| !side.contains(v)).collect(),
    };
    if let Some(v) = vars.iter().find(|v| side.contains(v)) {
        return Err(usage(format!(
            "variable '{}' is both a source and side information",
            name(&net, *v)
        )));
    }
    if vars.is_empty() {
        return Err(usage("no source variables"));
    }
    let d = spec(&net, args.distortion);
    let mut scope = side.clone();
    scope.extend_from_slice(&vars);
    let table = marginal(&net, &scope, guard)?;
    let ds: Vec<_> = vars.iter().map(|&v| d.for_var(v).clone()).collect();
    let problem = RdProblem::from_table(&table, &vars, &side, &ds, guard)?;

    let m = vars.len();
    let grid = if !args.targets.is_empty() {
        SweepGrid::Targets(parse_points(&args.targets, m, "--targets")?)
    } else if !args.slopes.is_empty() {
        SweepGrid::Slopes(parse_points(&args.slopes, m, "--slopes")?)
    } else {
        if args.min_slope.is_nan() || args.min_slope >= 0.0 || args.points == 0 {
            return Err(usage("--min-slope must be negative and --points positive"));
        }
        match SweepGrid::linear_slopes(-0.05_f64.max(args.min_slope), args.min_slope, args.points) {
            SweepGrid::Slopes(s) => SweepGrid::Slopes(s.into_iter().map(|v| vec![v[0]; m]).collect()),
            other => other,
        }
    };
    let requested: Vec<Vec<f64>> = match &grid {
        SweepGrid::Slopes(v) | SweepGrid::Targets(v) => v.clone(),
    };
    let curve = rd_curve(&problem, &grid, opts);

    let names: Vec<&str> = vars.iter().map(|&v| name(&net, v)).collect();
    let mut header: Vec<String> = names.iter().map(|n| format!("slope_{n}")).collect();
    header.push("rate_bits".into());
    header.extend(names.iter().map(|n| format!("D_{n}")));
    header.extend(["converged", "iterations"].map(String::from));
    let mut out = Csv::new(&header);
    for (req, pt) in requested.iter().zip(&curve.points) {
        match pt {
            Ok(pt) => {
                let mut row: Vec<String> = pt.slopes.iter().map(|&s| num(s)).collect();
                row.push(num(pt.rate));
                row.extend(pt.distortions.iter().map(|&x| num(x)));
                row.push(pt.converged.to_string());
                row.push(pt.iterations.to_string());
                out.row(&row);
            }
            Err(e) => {
                eprintln!("point {}: {e}", join_nums(req));
                let mut row = vec!["nan".to_string(); 2 * m + 1];
                if matches!(grid, SweepGrid::Slopes(_)) {
                    row[..m].iter_mut().zip(req).for_each(|(c, &s)| *c = num(s));
                } else {
                    row[m + 1..].iter_mut().zip(req).for_each(|(c, &t)| *c = num(t));
                }
                row.extend(["false".to_string(), "0".to_string()]);
                out.row(&row);
            }
        }
    }
    emit(args.output.as_deref(), &out.finish())
}
