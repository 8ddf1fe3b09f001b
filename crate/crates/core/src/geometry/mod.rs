//! Model spaces, thick polyline embeddings, certified thickness
//! verification, volume and diameter estimation, and the bridges between
//! embeddings and wirings.

mod coarsen;
mod embed;
mod measure;
mod realize;
mod space;
pub mod svg;
mod thickness;

pub use coarsen::{box_lattice_net, coarsen_embedding, CoarsenReport, NetSpec};
pub use embed::{
    complete_h2_slab_embedding, complete_slab_embedding, h2_slab_center,
    h2_slab_volume_bound, horoproduct_embed, scale_embedding, slab_to_h2xr, slab_to_h3,
    PolylinePath, ThickEmbedding,
};
pub use measure::{embedding_diameter, estimate_volume, max_distance_to_point, VolumeEstimate, VolumeMethod};
pub use realize::{realize_grid_wiring, RealizeReport};
pub use space::{ball_volume, h0, ModelSpace, Point};
pub use thickness::{verify_thickness, CertStatus, ThicknessCertificate};
