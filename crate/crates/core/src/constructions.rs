//! Materials and layered constructions for building surfaces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("missing construction '{0}'")]
    MissingConstruction(String),
    #[error("construction '{construction}' references unknown material '{material}'")]
    MissingMaterial {
        construction: String,
        material: String,
    },
    #[error("invalid physical property: {0}")]
    InvalidProperty(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
    /// m
    pub thickness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub name: String,
    /// Outside to inside.
    pub layers: Vec<String>,
}

/// Simple glazing system (whole-window U-factor and SHGC).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Glazing {
    pub name: String,
    pub u_factor: f64,
    pub shgc: f64,
}

/// Which construction each surface family uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceAssignments {
    pub exterior_wall: String,
    pub roof: String,
    pub ground_floor: String,
    pub interior_wall: String,
    /// Ceiling/floor between storeys.
    pub interior_floor: String,
    pub door: String,
    /// Glazing name.
    pub window: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSet {
    pub id: String,
    pub materials: Vec<Material>,
    pub constructions: Vec<Construction>,
    #[serde(default)]
    pub glazings: Vec<Glazing>,
    pub assignments: SurfaceAssignments,
}

/// Surface family, used to pick an assigned construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceRole {
    ExteriorWall,
    Roof,
    GroundFloor,
    InteriorWall,
    InteriorFloor,
    Door,
}

impl ConstructionSet {
    pub fn material(&self, name: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.name == name)
    }

    pub fn construction(&self, name: &str) -> Option<&Construction> {
        self.constructions.iter().find(|c| c.name == name)
    }

    pub fn glazing(&self, name: &str) -> Option<&Glazing> {
        self.glazings.iter().find(|g| g.name == name)
    }

    pub fn assigned(&self, role: SurfaceRole) -> &str {
        let a = &self.assignments;
        match role {
            SurfaceRole::ExteriorWall => &a.exterior_wall,
            SurfaceRole::Roof => &a.roof,
            SurfaceRole::GroundFloor => &a.ground_floor,
            SurfaceRole::InteriorWall => &a.interior_wall,
            SurfaceRole::InteriorFloor => &a.interior_floor,
            SurfaceRole::Door => &a.door,
        }
    }

    /// Layer-sum U-value (W/m²K), 1 / Σ thickness/conductivity. Surface films are left to the
    /// detailed simulator.
    pub fn u_value(&self, construction: &str) -> Result<f64, ConstructionError> {
        let c = self
            .construction(construction)
            .ok_or_else(|| ConstructionError::MissingConstruction(construction.to_string()))?;
        let mut r = 0.0;
        for layer in &c.layers {
            let m = self
                .material(layer)
                .ok_or_else(|| ConstructionError::MissingMaterial {
                    construction: c.name.clone(),
                    material: layer.clone(),
                })?;
            r += m.thickness / m.conductivity;
        }
        if r <= 0.0 {
            return Err(ConstructionError::InvalidProperty(format!(
                "construction '{}' has no layers",
                c.name
            )));
        }
        Ok(1.0 / r)
    }

    pub fn role_u_value(&self, role: SurfaceRole) -> Result<f64, ConstructionError> {
        self.u_value(self.assigned(role))
    }

    pub fn window_glazing(&self) -> Result<&Glazing, ConstructionError> {
        self.glazing(&self.assignments.window)
            .ok_or_else(|| ConstructionError::MissingConstruction(self.assignments.window.clone()))
    }

    /// Checks every reference and physical property.
    pub fn check(&self) -> Result<(), ConstructionError> {
        let mut names = BTreeSet::new();
        for m in &self.materials {
            if !names.insert(m.name.as_str()) {
                return Err(ConstructionError::InvalidProperty(format!(
                    "duplicate material '{}'",
                    m.name
                )));
            }
            if !(m.conductivity > 0.0
                && m.density > 0.0
                && m.specific_heat > 0.0
                && m.thickness > 0.0)
            {
                return Err(ConstructionError::InvalidProperty(format!(
                    "material '{}'",
                    m.name
                )));
            }
        }
        for c in &self.constructions {
            self.u_value(&c.name)?;
        }
        for g in &self.glazings {
            if !(g.u_factor > 0.0 && g.shgc > 0.0 && g.shgc < 1.0) {
                return Err(ConstructionError::InvalidProperty(format!(
                    "glazing '{}'",
                    g.name
                )));
            }
        }
        for role in [
            SurfaceRole::ExteriorWall,
            SurfaceRole::Roof,
            SurfaceRole::GroundFloor,
            SurfaceRole::InteriorWall,
            SurfaceRole::InteriorFloor,
            SurfaceRole::Door,
        ] {
            self.role_u_value(role)?;
        }
        self.window_glazing()?;
        Ok(())
    }

    /// Medium-weight masonry set bundled with the tool.
    pub fn bundled_default() -> Self {
        let mat = |name: &str, k: f64, rho: f64, cp: f64, t: f64| Material {
            name: name.into(),
            conductivity: k,
            density: rho,
            specific_heat: cp,
            thickness: t,
        };
        let cons = |name: &str, layers: &[&str]| Construction {
            name: name.into(),
            layers: layers.iter().map(|s| s.to_string()).collect(),
        };
        Self {
            id: "default".into(),
            materials: vec![
                mat("Brick 110mm", 0.77, 1700.0, 800.0, 0.11),
                mat("EPS 60mm", 0.036, 25.0, 1400.0, 0.06),
                mat("EPS 100mm", 0.036, 25.0, 1400.0, 0.10),
                mat("Concrete 200mm", 1.95, 2300.0, 900.0, 0.20),
                mat("Gypsum 15mm", 0.25, 900.0, 1000.0, 0.015),
                mat("Timber 40mm", 0.13, 500.0, 1600.0, 0.04),
            ],
            constructions: vec![
                cons(
                    "Exterior Wall",
                    &["Brick 110mm", "EPS 60mm", "Brick 110mm", "Gypsum 15mm"],
                ),
                cons("Roof", &["EPS 100mm", "Concrete 200mm", "Gypsum 15mm"]),
                cons("Ground Floor", &["Concrete 200mm", "EPS 100mm"]),
                cons(
                    "Interior Wall",
                    &["Gypsum 15mm", "Brick 110mm", "Gypsum 15mm"],
                ),
                cons("Interior Floor", &["Concrete 200mm", "Gypsum 15mm"]),
                cons("Door", &["Timber 40mm"]),
            ],
            glazings: vec![Glazing {
                name: "Double Glazing".into(),
                u_factor: 2.8,
                shgc: 0.6,
            }],
            assignments: SurfaceAssignments {
                exterior_wall: "Exterior Wall".into(),
                roof: "Roof".into(),
                ground_floor: "Ground Floor".into(),
                interior_wall: "Interior Wall".into(),
                interior_floor: "Interior Floor".into(),
                door: "Door".into(),
                window: "Double Glazing".into(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_set_is_consistent() {
        let set = ConstructionSet::bundled_default();
        set.check().unwrap();
        let u = set.role_u_value(SurfaceRole::ExteriorWall).unwrap();
        assert!(u > 0.3 && u < 0.6, "{u}");
    }

    #[test]
    fn u_value_is_inverse_layer_resistance() {
        let mut set = ConstructionSet::bundled_default();
        set.materials.push(Material {
            name: "R2".into(),
            conductivity: 0.05,
            density: 30.0,
            specific_heat: 1000.0,
            thickness: 0.1,
        });
        set.constructions.push(Construction {
            name: "Half".into(),
            layers: vec!["R2".into()],
        });
        assert!((set.u_value("Half").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn missing_references_are_errors() {
        let mut set = ConstructionSet::bundled_default();
        assert!(matches!(
            set.u_value("nope"),
            Err(ConstructionError::MissingConstruction(_))
        ));
        set.constructions[0].layers.push("Unobtainium".into());
        assert!(matches!(
            set.check(),
            Err(ConstructionError::MissingMaterial { .. })
        ));
    }
}
