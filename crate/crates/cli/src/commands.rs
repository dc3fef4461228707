use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use parahoric::affine::{
    apartment_embedding, extended_weyl_inclusion, maximal_facets, AffineRootSystem, Facet, FrobeniusForm,
};
use parahoric::centralizer::{component_group_in, pseudo_levi_in, torsion_classes, KacContext, KacPoint, PseudoLevi};
use parahoric::chevalley::ChevalleyAlgebra;
use parahoric::fdeg::fdeg_row;
use parahoric::verify::{
    claims, unramified_forms, verify_dist_of_root, verify_highest_root_indep_seeded, verify_minimal_element_counts,
    verify_y_vs_y_prime, Certificate, PinningVerifier, Scope, Verdict,
};
use parahoric::{CartanType, Isogeny, RootDatum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CliError, RunConfig};
use crate::input::{read_forms, read_kac};
use crate::report::{Outcome, Row, Status};
use crate::IsogenyArg;

/// Order-preserving parallel map; items reached after the deadline go to `skipped`.
fn par_map<T: Sync>(
    config: &RunConfig,
    items: &[T],
    run: impl Fn(&T) -> Vec<Row> + Sync,
    skipped: impl Fn(&T) -> Vec<Row> + Sync,
) -> Vec<Row> {
    let slots: Vec<Mutex<Vec<Row>>> = items.iter().map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..config.jobs.min(items.len()).max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let rows = if config.out_of_time() { skipped(item) } else { run(item) };
                *slots[i].lock().unwrap() = rows;
            });
        }
    });
    slots.into_iter().flat_map(|m| m.into_inner().unwrap()).collect()
}

fn type_scope(t: CartanType) -> Value {
    json!({ "type": t.label() })
}

fn too_large(config: &RunConfig, t: CartanType) -> Option<Row> {
    let sys = parahoric::RootSystem::of_type(t.split());
    (sys.dim() > config.max_dim).then(|| {
        Row::not_computed(
            type_scope(t),
            format!("adjoint dimension {} exceeds --max-dim {}", sys.dim(), config.max_dim),
        )
    })
}

fn time_skip(scope: Value) -> Vec<Row> {
    vec![Row::not_computed(scope, "time limit reached")]
}

fn isogeny_label(i: &Isogeny) -> &'static str {
    match i {
        Isogeny::Adjoint => "adjoint",
        Isogeny::SimplyConnected => "simply-connected",
        Isogeny::Intermediate(_) => "intermediate",
    }
}

#[derive(Serialize)]
struct BuildRow {
    #[serde(rename = "type")]
    type_label: String,
    rank: usize,
    roots: usize,
    positive_roots: usize,
    dim: usize,
    highest_root: Vec<i64>,
    marks: Vec<i64>,
    coxeter_number: i64,
    exponents: Vec<i64>,
    degrees: Vec<i64>,
    weyl_order: u128,
    /// `P^vee / Q^vee`, the fundamental group of the adjoint group.
    omega: Vec<i64>,
    /// Nodes of the extended diagram carrying an element of `Omega`.
    special_nodes: Vec<usize>,
    w0_square: parahoric::chevalley::W0Square,
}

pub fn build(config: &RunConfig) -> Result<Outcome, CliError> {
    let types = config.types();
    let rows = par_map(
        config,
        &types,
        |&t| {
            if let Some(r) = too_large(config, t) {
                return vec![r];
            }
            let a = AffineRootSystem::new(t);
            let sys = a.system();
            let hr = sys.highest_root().expect("irreducible");
            let w0 = match ChevalleyAlgebra::of_system(sys) {
                Ok(alg) => alg.w0_square_identity(),
                Err(e) => return vec![Row::not_computed(type_scope(t), e)],
            };
            let row = BuildRow {
                type_label: t.label(),
                rank: sys.rank(),
                roots: sys.num_roots(),
                positive_roots: sys.num_positive(),
                dim: sys.dim(),
                highest_root: sys.root(hr).clone(),
                marks: a.marks().to_vec(),
                coxeter_number: sys.coxeter_number().expect("irreducible"),
                exponents: sys.exponents(),
                degrees: sys.degrees(),
                weyl_order: sys.weyl_order(),
                omega: a.datum().fundamental_group().invariant_factors,
                special_nodes: a.omega().map(|om| om.iter().map(|e| e.node).collect()).unwrap_or_default(),
                w0_square: w0.clone(),
            };
            vec![Row::new(if w0.holds() { Status::Verified } else { Status::Failed }, row)]
        },
        |&t| time_skip(type_scope(t)),
    );
    Ok(Outcome {
        rows,
        columns: vec![
            ("type", "/type"),
            ("roots", "/roots"),
            ("dim", "/dim"),
            ("h", "/coxeter_number"),
            ("|W|", "/weyl_order"),
            ("Omega", "/omega"),
            ("marks", "/marks"),
        ],
    })
}

/// One form job: the adjoint affine system, the form and an optional single facet.
struct FormJob {
    cartan_type: CartanType,
    affine: AffineRootSystem,
    forms: Vec<(FrobeniusForm, Option<Facet>)>,
}

fn form_jobs(config: &RunConfig, form_file: Option<&Path>) -> Result<Vec<FormJob>, CliError> {
    if let Some(path) = form_file {
        return Ok(read_forms(path, config.max_rank)?
            .into_iter()
            .map(|f| FormJob { cartan_type: f.cartan_type, affine: f.affine, forms: vec![(f.form, f.facet)] })
            .collect());
    }
    let jobs: Vec<FormJob> = config
        .types()
        .into_iter()
        .map(|t| {
            let affine = AffineRootSystem::new(t);
            let forms = unramified_forms(&affine, t)
                .into_iter()
                .filter(|f| config.twist_allowed(f.cartan_type.twist) && config.inner_allowed(f.inner))
                .map(|f| (f, None))
                .collect();
            FormJob { cartan_type: t, affine, forms }
        })
        .filter(|j| !j.forms.is_empty())
        .collect();
    if jobs.is_empty() {
        return Err(CliError::Usage("no form left in scope after filtering".into()));
    }
    Ok(jobs)
}

#[derive(Serialize)]
struct AtlasRowOut<'a> {
    #[serde(flatten)]
    report: &'a parahoric::verify::AtlasReport,
    flagged_class_count: usize,
}

pub fn atlas(config: &RunConfig, form_file: Option<&Path>) -> Result<Outcome, CliError> {
    let jobs = form_jobs(config, form_file)?;
    let rows = par_map(
        config,
        &jobs,
        |job| {
            if let Some(r) = too_large(config, job.cartan_type) {
                return vec![r];
            }
            job.forms
                .iter()
                .map(|(form, _)| match parahoric::verify::atlas_report(&job.affine, form) {
                    Ok(rep) => {
                        let status = match rep.fixture_match {
                            Some(true) => Status::Verified,
                            Some(false) => Status::Failed,
                            None => Status::Computed,
                        };
                        Row::new(status, AtlasRowOut { flagged_class_count: rep.flagged_classes.len(), report: &rep })
                    }
                    Err(e) => Row::not_computed(json!({ "type": job.cartan_type.label(), "form": form.label() }), e),
                })
                .collect()
        },
        |job| time_skip(type_scope(job.cartan_type)),
    );
    Ok(Outcome {
        rows,
        columns: vec![
            ("type", "/type"),
            ("form", "/form"),
            ("classes", "/flagged_class_count"),
            ("flagged", "/flagged_classes"),
            ("fixture", "/fixture_match"),
        ],
    })
}

pub fn lemmas(config: &RunConfig) -> Result<Outcome, CliError> {
    let types = config.types();
    let rows = par_map(
        config,
        &types,
        |&t| {
            if let Some(r) = too_large(config, t) {
                return vec![r];
            }
            [
                verify_highest_root_indep_seeded(t, config.seed),
                verify_y_vs_y_prime(t),
                verify_dist_of_root(t),
                verify_minimal_element_counts(t, None),
            ]
            .iter()
            .map(Row::certificate)
            .collect()
        },
        |&t| time_skip(type_scope(t)),
    );
    Ok(certificate_outcome(rows))
}

pub fn pinning(config: &RunConfig, form_file: Option<&Path>) -> Result<Outcome, CliError> {
    let jobs = form_jobs(config, form_file)?;
    let rows = par_map(
        config,
        &jobs,
        |job| {
            if let Some(r) = too_large(config, job.cartan_type) {
                return vec![r];
            }
            let v = match PinningVerifier::new(job.cartan_type.split()) {
                Ok(v) => v,
                Err(e) => return vec![Row::not_computed(type_scope(job.cartan_type), e)],
            };
            let mut out = Vec::new();
            for (form, facet) in &job.forms {
                let facets = match facet {
                    Some(f) => vec![f.clone()],
                    None => maximal_facets(&v.affine, form),
                };
                out.extend(facets.iter().map(|f| Row::certificate(&v.verify(form, f))));
            }
            out
        },
        |job| time_skip(type_scope(job.cartan_type)),
    );
    Ok(certificate_outcome(rows))
}

fn certificate_outcome(rows: Vec<Row>) -> Outcome {
    Outcome {
        rows,
        columns: vec![
            ("claim", "/claim"),
            ("type", "/scope/type"),
            ("form", "/scope/form"),
            ("facet", "/scope/facet"),
            ("element", "/scope/element"),
        ],
    }
}

/// Torsion points of one datum, either from a file or by alcove enumeration.
struct PointJob {
    cartan_type: CartanType,
    datum: RootDatum,
    points: Option<Vec<(Option<String>, KacPoint)>>,
}

fn point_jobs(config: &RunConfig, kac: Option<&Path>) -> Result<Vec<PointJob>, CliError> {
    let isogenies = match config.isogeny.unwrap_or(IsogenyArg::Adjoint) {
        IsogenyArg::Adjoint => vec![Isogeny::Adjoint],
        IsogenyArg::SimplyConnected => vec![Isogeny::SimplyConnected],
        IsogenyArg::Both => vec![Isogeny::Adjoint, Isogeny::SimplyConnected],
    };
    let types = config.types();
    if let Some(path) = kac {
        if types.len() != 1 || isogenies.len() != 1 {
            return Err(CliError::Usage(format!(
                "--kac needs exactly one type and one isogeny; the filters select {} types",
                types.len()
            )));
        }
        let t = types[0];
        let datum = RootDatum::build(t, isogenies[0].clone()).map_err(|e| CliError::Usage(e.to_string()))?;
        let points = read_kac(path, &datum)?;
        return Ok(vec![PointJob { cartan_type: t, datum, points: Some(points) }]);
    }
    let mut jobs = Vec::new();
    for t in types {
        for iso in &isogenies {
            let datum = RootDatum::build(t, iso.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
            jobs.push(PointJob { cartan_type: t, datum, points: None });
        }
    }
    Ok(jobs)
}

fn point_label(p: &KacPoint) -> String {
    let c: Vec<String> = p.coords.iter().map(|x| x.to_string()).collect();
    format!("({})/{}", c.join(","), p.order)
}

#[derive(Serialize)]
struct PointHeader {
    #[serde(rename = "type")]
    type_label: String,
    isogeny: &'static str,
    label: Option<String>,
    point: String,
}

/// Run `f` on every point of every job.
fn over_points(
    config: &RunConfig,
    kac: Option<&Path>,
    f: impl Fn(&KacContext, &PointHeader, &KacPoint) -> Row + Sync,
) -> Result<Vec<Row>, CliError> {
    let jobs = point_jobs(config, kac)?;
    let scope =
        |job: &PointJob| json!({ "type": job.cartan_type.label(), "isogeny": isogeny_label(&job.datum.isogeny) });
    Ok(par_map(
        config,
        &jobs,
        |job| {
            if let Some(r) = too_large(config, job.cartan_type) {
                return vec![r];
            }
            let ctx = match KacContext::new(&job.datum) {
                Ok(c) => c,
                Err(e) => return vec![Row::not_computed(scope(job), e)],
            };
            let points: Vec<(Option<String>, KacPoint)> = match &job.points {
                Some(p) => p.clone(),
                None => torsion_classes(&ctx, config.order.unwrap_or(1)).into_iter().map(|s| (None, s)).collect(),
            };
            points
                .iter()
                .map(|(label, s)| {
                    let header = PointHeader {
                        type_label: job.cartan_type.label(),
                        isogeny: isogeny_label(&job.datum.isogeny),
                        label: label.clone(),
                        point: point_label(s),
                    };
                    if config.out_of_time() {
                        return Row::not_computed(serde_json::to_value(&header).unwrap(), "time limit reached");
                    }
                    f(&ctx, &header, s)
                })
                .collect()
        },
        |job| time_skip(scope(job)),
    ))
}

fn levi_or_row(ctx: &KacContext, header: &PointHeader, s: &KacPoint) -> Result<PseudoLevi, Row> {
    pseudo_levi_in(ctx, s).map_err(|e| Row::not_computed(serde_json::to_value(header).unwrap(), e))
}

#[derive(Serialize)]
struct WithHeader<'a, T: Serialize> {
    #[serde(flatten)]
    header: &'a PointHeader,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct LeviBody<'a> {
    pseudo_levi: &'a str,
    kac: &'a [i64],
    alcove_nodes: &'a [usize],
    basis: &'a [usize],
    num_roots: usize,
    omega_torsion: &'a [i64],
    omega_free_rank: usize,
}

pub fn pseudo_levi(config: &RunConfig, kac: Option<&Path>) -> Result<Outcome, CliError> {
    let rows = over_points(config, kac, |ctx, header, s| {
        let h = match levi_or_row(ctx, header, s) {
            Ok(h) => h,
            Err(r) => return r,
        };
        let body = LeviBody {
            pseudo_levi: &h.type_label,
            kac: &h.kac,
            alcove_nodes: &h.alcove_nodes,
            basis: &h.basis,
            num_roots: h.roots.len(),
            omega_torsion: &h.omega_torsion,
            omega_free_rank: h.omega_free_rank,
        };
        Row::new(Status::Computed, WithHeader { header, body })
    })?;
    Ok(Outcome {
        rows,
        columns: vec![
            ("type", "/type"),
            ("isogeny", "/isogeny"),
            ("point", "/point"),
            ("kac", "/kac"),
            ("pseudo-levi", "/pseudo_levi"),
            ("Omega_H", "/omega_torsion"),
        ],
    })
}

#[derive(Serialize)]
struct ComponentBody<'a> {
    pseudo_levi: &'a str,
    order: usize,
    #[serde(flatten)]
    group: &'a parahoric::centralizer::ComponentGroup,
}

pub fn component_group(config: &RunConfig, kac: Option<&Path>) -> Result<Outcome, CliError> {
    let rows = over_points(config, kac, |ctx, header, s| {
        let h = match levi_or_row(ctx, header, s) {
            Ok(h) => h,
            Err(r) => return r,
        };
        match component_group_in(ctx, s, config.weyl_guard) {
            Ok(g) => Row::new(
                Status::Computed,
                WithHeader { header, body: ComponentBody { pseudo_levi: &h.type_label, order: g.order(), group: &g } },
            ),
            Err(e) => Row::not_computed(serde_json::to_value(header).unwrap(), e),
        }
    })?;
    Ok(Outcome {
        rows,
        columns: vec![
            ("type", "/type"),
            ("isogeny", "/isogeny"),
            ("point", "/point"),
            ("pseudo-levi", "/pseudo_levi"),
            ("order", "/order"),
            ("confidence", "/confidence"),
        ],
    })
}

fn point_scope(header: &PointHeader) -> Scope {
    Scope {
        type_label: header.type_label.clone(),
        form: Some(header.isogeny.to_string()),
        facet: None,
        element: Some(header.point.clone()),
    }
}

pub fn kottwitz(config: &RunConfig, kac: Option<&Path>) -> Result<Outcome, CliError> {
    let rows = over_points(config, kac, |ctx, header, s| {
        let h = match levi_or_row(ctx, header, s) {
            Ok(h) => h,
            Err(r) => return r,
        };
        let cert = match extended_weyl_inclusion(&ctx.datum, &h.roots) {
            Ok(w) => {
                let ok = w.commutes && w.surjective;
                let verdict = if ok { Verdict::Verified } else { Verdict::Failed };
                let witness = json!({ "pseudo_levi": h.type_label, "inclusion": w });
                Certificate::new(claims::KOTTWITZ_SQUARE, point_scope(header), verdict, witness)
            }
            Err(e) => Certificate::new(
                claims::KOTTWITZ_SQUARE,
                point_scope(header),
                Verdict::NotComputed,
                json!({ "error": e.to_string() }),
            ),
        };
        Row::certificate(&cert)
    })?;
    Ok(certificate_outcome(rows))
}

pub fn apartment(config: &RunConfig, kac: Option<&Path>) -> Result<Outcome, CliError> {
    let rows = over_points(config, kac, |ctx, header, s| {
        let h = match levi_or_row(ctx, header, s) {
            Ok(h) => h,
            Err(r) => return r,
        };
        let cert = match apartment_embedding(ctx.system(), &h.roots) {
            Ok(a) => {
                let verdict = if a.level_sets_are_z { Verdict::Verified } else { Verdict::Failed };
                Certificate::new(claims::APARTMENT_EMBEDDING, point_scope(header), verdict, json!(a))
            }
            Err(e) => Certificate::new(
                claims::APARTMENT_EMBEDDING,
                point_scope(header),
                Verdict::NotComputed,
                json!({ "error": e.to_string() }),
            ),
        };
        Row::certificate(&cert)
    })?;
    Ok(certificate_outcome(rows))
}

pub fn fdeg(config: &RunConfig, kac: Option<&Path>) -> Result<Outcome, CliError> {
    let rows = over_points(config, kac, |ctx, header, s| {
        let h = match levi_or_row(ctx, header, s) {
            Ok(h) => h,
            Err(r) => return r,
        };
        let comp = match component_group_in(ctx, s, config.weyl_guard) {
            Ok(g) => g.order() as u64,
            Err(e) => return Row::not_computed(serde_json::to_value(header).unwrap(), e),
        };
        match fdeg_row(&ctx.datum, &h, comp) {
            Ok(row) => {
                let ok = row.cross_check && row.pprime_matches_exponent;
                Row::new(if ok { Status::Verified } else { Status::Failed }, WithHeader { header, body: row })
            }
            Err(e) => Row::not_computed(serde_json::to_value(header).unwrap(), e),
        }
    })?;
    Ok(Outcome {
        rows,
        columns: vec![
            ("type", "/type"),
            ("point", "/point"),
            ("pseudo-levi", "/pseudo_levi"),
            ("N_G", "/n_g"),
            ("N_H", "/n_h"),
            ("exponent", "/ratio_exponent"),
            ("conductor", "/conductor/conductor"),
            ("|G|/|H| (p')", "/pprime_ratio"),
        ],
    })
}
