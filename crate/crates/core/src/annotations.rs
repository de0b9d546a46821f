//! Per-frame boxes for one video, with optional identities and scores.
//!
//! Frames are 0-based here; the MOT text format is 1-based and converts at the
//! IO boundary.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub id: Option<u32>,
    pub bbox: BoundingBox,
    pub score: f64,
}

impl Annotation {
    pub fn new(id: Option<u32>, bbox: BoundingBox, score: f64) -> Self {
        Self { id, bbox, score }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceAnnotations {
    pub name: String,
    pub frame_count: Option<u32>,
    pub image_size: Option<(u32, u32)>,
    frames: BTreeMap<u32, Vec<Annotation>>,
}

impl SequenceAnnotations {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty sequence carrying the name and sizes of `other`.
    pub fn with_metadata_of(other: &Self) -> Self {
        Self {
            name: other.name.clone(),
            frame_count: other.frame_count,
            image_size: other.image_size,
            frames: BTreeMap::new(),
        }
    }

    /// Adds a box. A `(frame, id)` pair may occur at most once.
    pub fn insert(&mut self, frame: u32, annotation: Annotation) -> Result<()> {
        let entries = self.frames.entry(frame).or_default();
        if let Some(id) = annotation.id {
            if id == 0 {
                return Err(Error::ZeroIdentity);
            }
            if entries.iter().any(|a| a.id == Some(id)) {
                return Err(Error::DuplicateIdentity { frame, id });
            }
        }
        entries.push(annotation);
        Ok(())
    }

    /// Adds a box without the duplicate-identity check. Used for raw
    /// detection streams, whose ids carry no meaning.
    pub fn push_unchecked(&mut self, frame: u32, annotation: Annotation) {
        self.frames.entry(frame).or_default().push(annotation);
    }

    /// Ensures a frame exists even when it holds no boxes.
    pub fn touch_frame(&mut self, frame: u32) {
        self.frames.entry(frame).or_default();
    }

    pub fn frame(&self, frame: u32) -> &[Annotation] {
        self.frames.get(&frame).map_or(&[], Vec::as_slice)
    }

    /// Non-empty and touched frames in ascending order.
    pub fn frames(&self) -> impl Iterator<Item = (u32, &[Annotation])> {
        self.frames.iter().map(|(&f, v)| (f, v.as_slice()))
    }

    pub fn frame_indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.frames.keys().copied()
    }

    pub fn first_frame(&self) -> Option<u32> {
        self.frames.keys().next().copied()
    }

    pub fn last_frame(&self) -> Option<u32> {
        self.frames.keys().next_back().copied()
    }

    /// Total number of boxes.
    pub fn len(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorts every frame by identity (unlabelled boxes last, in insertion order).
    pub fn sort_by_identity(&mut self) {
        for v in self.frames.values_mut() {
            v.sort_by_key(|a| a.id.unwrap_or(u32::MAX));
        }
    }

    /// Boxes grouped by identity, each list in frame order. Unlabelled boxes
    /// are skipped.
    pub fn tracks(&self) -> BTreeMap<u32, Vec<(u32, BoundingBox)>> {
        let mut out: BTreeMap<u32, Vec<(u32, BoundingBox)>> = BTreeMap::new();
        for (&frame, entries) in &self.frames {
            for a in entries {
                if let Some(id) = a.id {
                    out.entry(id).or_default().push((frame, a.bbox));
                }
            }
        }
        out
    }

    pub fn identities(&self) -> Vec<u32> {
        self.tracks().into_keys().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_identity_rejected() {
        let b = BoundingBox::new(0., 0., 1., 1.).unwrap();
        let mut s = SequenceAnnotations::new();
        s.insert(0, Annotation::new(Some(5), b, 1.0)).unwrap();
        assert_eq!(s.insert(0, Annotation::new(Some(5), b, 1.0)), Err(Error::DuplicateIdentity { frame: 0, id: 5 }));
        s.insert(1, Annotation::new(Some(5), b, 1.0)).unwrap();
        s.insert(0, Annotation::new(None, b, 1.0)).unwrap();
        s.insert(0, Annotation::new(None, b, 1.0)).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.tracks()[&5].len(), 2);
        assert_eq!(s.insert(0, Annotation::new(Some(0), b, 1.0)), Err(Error::ZeroIdentity));
    }
}
