//! Line-oriented configuration files for molecules, materials and mirrors.
//!
//! ```text
//! # comments start with '#'
//! [molecule:YbF-vib]
//! transition = 9e10, 1.2e-58        # omega (rad/s), d^2 (C^2 m^2)
//!
//! [material:sapphire_300K]
//! model = constant                  # drude | constant | vacuum
//! eps_real = 10
//! eps_imag = 1e-4
//!
//! [mirror:my_bragg]
//! kind = bragg                      # halfspace | stack | constant_r | bragg
//! high = sapphire_300K
//! low = vacuum
//! pairs = 10
//! design_omega = 2.78973e12
//! ```
//!
//! A `drude` material takes `plasma_frequency` and `damping`. A `halfspace`
//! mirror takes `material`, a `constant_r` mirror takes `r`, and a `stack`
//! mirror takes one `layer = MATERIAL, THICKNESS` line per layer, front to
//! back, with the final layer given without a thickness (semi-infinite).
//! Entries are added on top of the built-in registry; redefining a built-in
//! name replaces it and logs a warning. Names are case-insensitive.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::warn;

use crate::error::{Error, Result};
use crate::materials::{quarter_wave_stack, Layer, MirrorSpec, PermittivityModel};
use crate::molecules::{Molecule, Transition};

/// Default quarter-wave design frequency: the LiH rotational transition.
const DEFAULT_DESIGN_OMEGA: f64 = 2.78973e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    molecules: BTreeMap<String, Molecule>,
    materials: BTreeMap<String, (String, PermittivityModel)>,
    mirrors: BTreeMap<String, (String, MirrorSpec)>,
}

fn key(name: &str) -> String {
    name.trim().to_ascii_lowercase()
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            molecules: BTreeMap::new(),
            materials: BTreeMap::new(),
            mirrors: BTreeMap::new(),
        }
    }

    /// LiH, gold, sapphire at 300 K and 77 K, GaAs, AlAs and vacuum, plus
    /// the corresponding half-space and Bragg mirrors.
    pub fn builtin() -> Self {
        let mut reg = Registry::empty();
        reg.molecules.insert(key("LiH"), Molecule::lih());
        let materials = [
            ("vacuum", PermittivityModel::Vacuum),
            ("gold", PermittivityModel::gold()),
            ("sapphire_300K", PermittivityModel::ConstantLossy { eps_real: 10.0, eps_imag: 1e-4 }),
            ("sapphire_77K", PermittivityModel::ConstantLossy { eps_real: 10.0, eps_imag: 1e-6 }),
            ("GaAs", PermittivityModel::ConstantLossy { eps_real: 12.96, eps_imag: 0.02 }),
            ("AlAs", PermittivityModel::ConstantLossy { eps_real: 10.96, eps_imag: 0.02 }),
        ];
        for (name, m) in materials {
            reg.materials.insert(key(name), (name.to_string(), m));
        }
        reg.mirrors.insert(
            key("gold"),
            ("gold".into(), MirrorSpec::HalfSpace(PermittivityModel::gold())),
        );
        let bragg = [
            ("bragg_sapphire_300K", "sapphire_300K", "vacuum", 10),
            ("bragg_sapphire_77K", "sapphire_77K", "vacuum", 10),
            ("bragg_gaas_alas", "GaAs", "AlAs", 30),
        ];
        for (name, high, low, pairs) in bragg {
            let layers = quarter_wave_stack(
                reg.materials[&key(high)].1,
                reg.materials[&key(low)].1,
                pairs,
                DEFAULT_DESIGN_OMEGA,
            )
            .expect("built-in stacks are valid");
            reg.mirrors.insert(key(name), (name.to_string(), MirrorSpec::Stack(layers)));
        }
        reg
    }

    /// Built-ins extended by the entries in `source`.
    pub fn from_source(source: &str) -> Result<Self> {
        let mut reg = Registry::builtin();
        reg.load(source)?;
        Ok(reg)
    }

    pub fn molecule(&self, name: &str) -> Result<&Molecule> {
        self.molecules.get(&key(name)).ok_or_else(|| Error::UnknownName {
            kind: "molecule",
            name: name.to_string(),
        })
    }

    pub fn material(&self, name: &str) -> Result<PermittivityModel> {
        self.materials
            .get(&key(name))
            .map(|(_, m)| *m)
            .ok_or_else(|| Error::UnknownName {
                kind: "material",
                name: name.to_string(),
            })
    }

    /// A named mirror, or `r=VALUE` for an ideal constant-reflectivity wall.
    pub fn mirror(&self, name: &str) -> Result<MirrorSpec> {
        let trimmed = name.trim();
        if let Some(v) = trimmed.strip_prefix("r=") {
            let r: f64 = v.trim().parse().map_err(|_| Error::UnknownName {
                kind: "mirror",
                name: name.to_string(),
            })?;
            return MirrorSpec::constant_r(r);
        }
        self.mirrors
            .get(&key(trimmed))
            .map(|(_, m)| m.clone())
            .ok_or_else(|| Error::UnknownName {
                kind: "mirror",
                name: name.to_string(),
            })
    }

    pub fn molecules(&self) -> impl Iterator<Item = &Molecule> {
        self.molecules.values()
    }

    pub fn material_names(&self) -> impl Iterator<Item = &str> {
        self.materials.values().map(|(n, _)| n.as_str())
    }

    pub fn mirror_names(&self) -> impl Iterator<Item = &str> {
        self.mirrors.values().map(|(n, _)| n.as_str())
    }

    pub fn insert_molecule(&mut self, mol: Molecule) {
        if self.molecules.insert(key(&mol.name), mol.clone()).is_some() {
            warn!("molecule `{}` overrides an existing entry", mol.name);
        }
    }

    pub fn insert_material(&mut self, name: &str, model: PermittivityModel) -> Result<()> {
        model.validate()?;
        if self.materials.insert(key(name), (name.to_string(), model)).is_some() {
            warn!("material `{name}` overrides an existing entry");
        }
        Ok(())
    }

    pub fn insert_mirror(&mut self, name: &str, mirror: MirrorSpec) -> Result<()> {
        mirror.validate()?;
        if self.mirrors.insert(key(name), (name.to_string(), mirror)).is_some() {
            warn!("mirror `{name}` overrides an existing entry");
        }
        Ok(())
    }

    /// Parses `source` and adds its entries. Materials are registered before
    /// mirrors, so a mirror may refer to a material defined later in the file.
    /// On error the registry is left unchanged.
    pub fn load(&mut self, source: &str) -> Result<()> {
        let sections = parse_sections(source)?;
        let mut next = self.clone();
        for s in sections.iter().filter(|s| s.kind == SectionKind::Molecule) {
            next.insert_molecule(build_molecule(s)?);
        }
        for s in sections.iter().filter(|s| s.kind == SectionKind::Material) {
            let m = build_material(s)?;
            next.insert_material(&s.name, m).map_err(|e| s.error(s.line, "model", e))?;
        }
        for s in sections.iter().filter(|s| s.kind == SectionKind::Mirror) {
            let m = build_mirror(s, &next)?;
            next.insert_mirror(&s.name, m).map_err(|e| s.error(s.line, "kind", e))?;
        }
        *self = next;
        Ok(())
    }

    /// The molecule and material entries in the configuration format.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for mol in self.molecules.values() {
            molecule_section(&mut out, mol);
        }
        for (name, m) in self.materials.values() {
            let _ = writeln!(out, "[material:{name}]");
            match m {
                PermittivityModel::Drude {
                    plasma_frequency,
                    damping,
                } => {
                    let _ = writeln!(out, "model = drude");
                    let _ = writeln!(out, "plasma_frequency = {plasma_frequency:e}");
                    let _ = writeln!(out, "damping = {damping:e}");
                }
                PermittivityModel::ConstantLossy { eps_real, eps_imag } => {
                    let _ = writeln!(out, "model = constant");
                    let _ = writeln!(out, "eps_real = {eps_real:e}");
                    let _ = writeln!(out, "eps_imag = {eps_imag:e}");
                }
                PermittivityModel::Vacuum => {
                    let _ = writeln!(out, "model = vacuum");
                }
            }
            out.push('\n');
        }
        out
    }
}

fn molecule_section(out: &mut String, mol: &Molecule) {
    let _ = writeln!(out, "[molecule:{}]", mol.name);
    for t in &mol.transitions {
        let _ = writeln!(out, "transition = {:e}, {:e}", t.omega, t.d_squared);
    }
    out.push('\n');
}

/// Serializes molecules in the configuration format.
pub fn molecules_to_config<'a>(mols: impl IntoIterator<Item = &'a Molecule>) -> String {
    let mut out = String::new();
    for m in mols {
        molecule_section(&mut out, m);
    }
    out
}

/// The built-in molecules plus the molecule entries of `source`.
pub fn load_molecules(source: &str) -> Result<Vec<Molecule>> {
    Ok(Registry::from_source(source)?.molecules().cloned().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SectionKind {
    Molecule,
    Material,
    Mirror,
}

#[derive(Debug)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

#[derive(Debug)]
struct Section {
    kind: SectionKind,
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn error(&self, line: usize, field: &str, message: impl ToString) -> Error {
        Error::Parse {
            line,
            field: format!("{}.{field}", self.name),
            message: message.to_string(),
        }
    }

    fn all<'a>(&'a self, k: &str) -> impl Iterator<Item = &'a Entry> {
        let k = k.to_string();
        self.entries.iter().filter(move |e| e.key == k)
    }

    fn get(&self, k: &str) -> Result<&Entry> {
        let mut it = self.all(k);
        let first = it
            .next()
            .ok_or_else(|| self.error(self.line, k, "missing field"))?;
        if let Some(dup) = it.next() {
            return Err(self.error(dup.line, k, "field given more than once"));
        }
        Ok(first)
    }

    fn get_opt(&self, k: &str) -> Result<Option<&Entry>> {
        if self.all(k).next().is_none() {
            Ok(None)
        } else {
            self.get(k).map(Some)
        }
    }

    fn number(&self, k: &str) -> Result<f64> {
        let e = self.get(k)?;
        parse_number(&e.value).map_err(|m| self.error(e.line, k, m))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(self.error(e.line, &e.key, "unknown field"));
            }
        }
        Ok(())
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_sections(source: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(header) = text.strip_prefix('[') {
            let header = header.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                field: "section".into(),
                message: "unterminated section header".into(),
            })?;
            let (kind, name) = header.split_once(':').ok_or_else(|| Error::Parse {
                line,
                field: "section".into(),
                message: "expected [kind:NAME]".into(),
            })?;
            let kind = match kind.trim() {
                "molecule" => SectionKind::Molecule,
                "material" => SectionKind::Material,
                "mirror" => SectionKind::Mirror,
                other => {
                    return Err(Error::Parse {
                        line,
                        field: "section".into(),
                        message: format!("unknown section kind `{other}`"),
                    })
                }
            };
            let name = name.trim();
            if name.is_empty() || name.starts_with("r=") {
                return Err(Error::Parse {
                    line,
                    field: "section".into(),
                    message: format!("invalid name `{name}`"),
                });
            }
            if sections
                .iter()
                .any(|s| s.kind == kind && key(&s.name) == key(name))
            {
                return Err(Error::Parse {
                    line,
                    field: "section".into(),
                    message: format!("`{name}` defined twice"),
                });
            }
            sections.push(Section {
                kind,
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = text.split_once('=').ok_or_else(|| Error::Parse {
            line,
            field: "entry".into(),
            message: "expected `key = value`".into(),
        })?;
        let section = sections.last_mut().ok_or_else(|| Error::Parse {
            line,
            field: k.trim().to_string(),
            message: "entry outside of a section".into(),
        })?;
        section.entries.push(Entry {
            line,
            key: k.trim().to_ascii_lowercase(),
            value: v.trim().to_string(),
        });
    }
    Ok(sections)
}

fn build_molecule(s: &Section) -> Result<Molecule> {
    s.check_keys(&["transition"])?;
    let mut transitions = Vec::new();
    for e in s.all("transition") {
        let parts: Vec<&str> = e.value.split(',').collect();
        if parts.len() != 2 {
            return Err(s.error(e.line, "transition", "expected `omega, d_squared`"));
        }
        let omega = parse_number(parts[0]).map_err(|m| s.error(e.line, "omega", m))?;
        let d2 = parse_number(parts[1]).map_err(|m| s.error(e.line, "d_squared", m))?;
        if !(omega > 0.0) {
            return Err(s.error(e.line, "omega", format!("must be > 0, got {omega}")));
        }
        if !(d2 > 0.0) {
            return Err(s.error(e.line, "d_squared", format!("must be > 0, got {d2}")));
        }
        transitions.push(Transition::new(omega, d2).map_err(|err| s.error(e.line, "transition", err))?);
    }
    if transitions.is_empty() {
        return Err(s.error(s.line, "transition", "molecule has no transitions"));
    }
    Molecule::new(s.name.clone(), transitions).map_err(|e| s.error(s.line, "transition", e))
}

fn build_material(s: &Section) -> Result<PermittivityModel> {
    let model = s.get("model")?;
    match model.value.to_ascii_lowercase().as_str() {
        "drude" => {
            s.check_keys(&["model", "plasma_frequency", "damping"])?;
            let wp = s.number("plasma_frequency")?;
            let g = s.number("damping")?;
            PermittivityModel::drude(wp, g).map_err(|e| s.error(model.line, "model", e))
        }
        "constant" => {
            s.check_keys(&["model", "eps_real", "eps_imag"])?;
            let re = s.number("eps_real")?;
            let im = match s.get_opt("eps_imag")? {
                Some(e) => parse_number(&e.value).map_err(|m| s.error(e.line, "eps_imag", m))?,
                None => 0.0,
            };
            PermittivityModel::constant_lossy(re, im).map_err(|e| s.error(model.line, "model", e))
        }
        "vacuum" => {
            s.check_keys(&["model"])?;
            Ok(PermittivityModel::Vacuum)
        }
        other => Err(s.error(model.line, "model", format!("unknown model `{other}`"))),
    }
}

fn build_mirror(s: &Section, reg: &Registry) -> Result<MirrorSpec> {
    let kind = s.get("kind")?;
    let material = |e: &Entry, field: &str, name: &str| {
        reg.material(name).map_err(|err| s.error(e.line, field, err))
    };
    match kind.value.to_ascii_lowercase().as_str() {
        "halfspace" => {
            s.check_keys(&["kind", "material"])?;
            let e = s.get("material")?;
            let m = material(e, "material", &e.value)?;
            MirrorSpec::half_space(m).map_err(|err| s.error(e.line, "material", err))
        }
        "constant_r" => {
            s.check_keys(&["kind", "r"])?;
            let e = s.get("r")?;
            let r = s.number("r")?;
            MirrorSpec::constant_r(r).map_err(|err| s.error(e.line, "r", err))
        }
        "stack" => {
            s.check_keys(&["kind", "layer"])?;
            let mut layers = Vec::new();
            let entries: Vec<&Entry> = s.all("layer").collect();
            for (i, e) in entries.iter().enumerate() {
                let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
                let m = material(e, "layer", parts[0])?;
                let last = i + 1 == entries.len();
                let layer = match (parts.len(), last) {
                    (1, true) => Layer::semi_infinite(m),
                    (2, false) => {
                        let d = parse_number(parts[1]).map_err(|msg| s.error(e.line, "layer", msg))?;
                        Layer::finite(m, d).map_err(|err| s.error(e.line, "layer", err))?
                    }
                    (1, false) => return Err(s.error(e.line, "layer", "only the last layer may omit its thickness")),
                    (2, true) => return Err(s.error(e.line, "layer", "the last layer is semi-infinite; omit its thickness")),
                    _ => return Err(s.error(e.line, "layer", "expected `MATERIAL, THICKNESS`")),
                };
                layers.push(layer);
            }
            if layers.is_empty() {
                return Err(s.error(kind.line, "layer", "stack has no layers"));
            }
            MirrorSpec::stack(layers).map_err(|err| s.error(kind.line, "layer", err))
        }
        "bragg" => {
            s.check_keys(&["kind", "high", "low", "pairs", "design_omega"])?;
            let hi = s.get("high")?;
            let lo = s.get("low")?;
            let high = material(hi, "high", &hi.value)?;
            let low = material(lo, "low", &lo.value)?;
            let pe = s.get("pairs")?;
            let pairs: usize = pe
                .value
                .parse()
                .map_err(|_| s.error(pe.line, "pairs", format!("`{}` is not a count", pe.value)))?;
            let omega = match s.get_opt("design_omega")? {
                Some(e) => parse_number(&e.value).map_err(|m| s.error(e.line, "design_omega", m))?,
                None => DEFAULT_DESIGN_OMEGA,
            };
            if !(omega > 0.0) {
                return Err(s.error(kind.line, "design_omega", "must be > 0"));
            }
            let layers = quarter_wave_stack(high, low, pairs, omega).map_err(|err| s.error(kind.line, "high", err))?;
            MirrorSpec::stack(layers).map_err(|err| s.error(kind.line, "kind", err))
        }
        other => Err(s.error(kind.line, "kind", format!("unknown mirror kind `{other}`"))),
    }
}
