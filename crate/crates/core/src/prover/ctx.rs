//! Dense indexing of the closure context for proof search.
//!
//! Every formula that can ever appear in the game lives in the componentwise
//! closure of the root, so sequents are represented as bit sets over the
//! sorted closure table plus a separate focus slot. Index order agrees with
//! the global formula order, which keeps tie-breaking stable.

use std::collections::HashMap;

use smallvec::{smallvec, SmallVec};

use crate::calculus::{
    Annotation, AnnotatedFormula, AnnotatedSequent, ClosureContext, Side, SplitSequent,
};
use crate::error::Error;
use crate::syntax::{fl_closure_neg, AtomicAction, Formula, FormulaKind, ProgramKind};

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits {
    words: SmallVec<[u64; 2]>,
}

impl Bits {
    pub fn empty(words: usize) -> Bits {
        Bits { words: smallvec![0; words] }
    }

    pub fn get(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] & (1 << (i % 64)) != 0
    }

    pub fn set(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn union_with(&mut self, other: &Bits) {
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter_map(move |b| {
                if w & (1 << b) != 0 {
                    Some((wi * 64 + b) as u32)
                } else {
                    None
                }
            })
        })
    }
}

/// A game sequent: unfocused formulas per component, and at most one focused
/// formula tracked separately (its unfocused copy may or may not be set).
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Pos {
    pub left: Bits,
    pub right: Bits,
    pub focus: Option<(Side, u32)>,
}

impl Pos {
    pub fn bits(&self, side: Side) -> &Bits {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn bits_mut(&mut self, side: Side) -> &mut Bits {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// All formula indices present in a component, focused or not.
    pub fn member_indices(&self, side: Side) -> Vec<u32> {
        let mut out: Vec<u32> = self.bits(side).ones().collect();
        if let Some((s, i)) = self.focus {
            if s == side && !self.bits(side).get(i) {
                out.push(i);
                out.sort();
            }
        }
        out
    }

    pub fn has_focus(&self) -> bool {
        self.focus.is_some()
    }
}

/// How a closure formula decomposes under the rules.
#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Top,
    Bot,
    Literal,
    And(u32, u32),
    Or(u32, u32),
    DiaAtom(AtomicAction, u32),
    BoxAtom(AtomicAction, u32),
    DiaSeq(u32),
    BoxSeq(u32),
    DiaChoice(u32, u32),
    BoxChoice(u32, u32),
    DiaStar(u32, u32),
    BoxStar(u32, u32),
    DiaTest(u32, u32),
    BoxTest(u32, u32),
}

pub(crate) struct Ctx {
    pub formulas: Vec<Formula>,
    pub index: HashMap<Formula, u32>,
    pub words: usize,
    pub left_ok: Bits,
    pub right_ok: Bits,
    pub neg: Vec<u32>,
    pub shape: Vec<Shape>,
    pub is_diamond: Vec<bool>,
    /// Per formula, the closure-with-negations of that formula alone, as a
    /// mask over the table; component closures are unions of these.
    pub fl_neg_mask: Vec<Bits>,
    /// `wrap[(action, body)]` is the index of `<action>body` when that
    /// formula is in the table.
    pub wrap: HashMap<(AtomicAction, u32), u32>,
}

impl Ctx {
    pub fn new(root: &SplitSequent) -> Ctx {
        let public = ClosureContext::for_root(root);
        let mut formulas: Vec<Formula> = public.left.union(&public.right).cloned().collect();
        formulas.sort();
        formulas.dedup();
        let index: HashMap<Formula, u32> =
            formulas.iter().enumerate().map(|(i, f)| (f.clone(), i as u32)).collect();
        let words = formulas.len().div_ceil(64).max(1);

        let mut left_ok = Bits::empty(words);
        let mut right_ok = Bits::empty(words);
        for (i, f) in formulas.iter().enumerate() {
            if public.left.contains(f) {
                left_ok.set(i as u32);
            }
            if public.right.contains(f) {
                right_ok.set(i as u32);
            }
        }

        let neg: Vec<u32> = formulas.iter().map(|f| index[&f.negate()]).collect();
        let shape: Vec<Shape> = formulas.iter().map(|f| Self::shape_of(f, &index)).collect();
        let is_diamond: Vec<bool> = formulas.iter().map(Formula::is_diamond).collect();
        let fl_neg_mask: Vec<Bits> = formulas
            .iter()
            .map(|f| {
                let mut mask = Bits::empty(words);
                for g in fl_closure_neg([f]) {
                    mask.set(index[&g]);
                }
                mask
            })
            .collect();

        let mut wrap = HashMap::new();
        for (i, f) in formulas.iter().enumerate() {
            if let FormulaKind::Dia(prog, body) = f.kind() {
                if let ProgramKind::Atom(a) = prog.kind() {
                    wrap.insert((a.clone(), index[body]), i as u32);
                }
            }
        }

        Ctx { formulas, index, words, left_ok, right_ok, neg, shape, is_diamond, fl_neg_mask, wrap }
    }

    fn shape_of(f: &Formula, index: &HashMap<Formula, u32>) -> Shape {
        let ix = |g: &Formula| index[g];
        match f.kind() {
            FormulaKind::Top => Shape::Top,
            FormulaKind::Bot => Shape::Bot,
            FormulaKind::Prop(_) | FormulaKind::NegProp(_) => Shape::Literal,
            FormulaKind::And(l, r) => Shape::And(ix(l), ix(r)),
            FormulaKind::Or(l, r) => Shape::Or(ix(l), ix(r)),
            FormulaKind::Dia(prog, body) => match prog.kind() {
                ProgramKind::Atom(a) => Shape::DiaAtom(a.clone(), ix(body)),
                ProgramKind::Seq(alpha, beta) => Shape::DiaSeq(ix(&Formula::dia(
                    alpha.clone(),
                    Formula::dia(beta.clone(), body.clone()),
                ))),
                ProgramKind::Choice(alpha, beta) => Shape::DiaChoice(
                    ix(&Formula::dia(alpha.clone(), body.clone())),
                    ix(&Formula::dia(beta.clone(), body.clone())),
                ),
                ProgramKind::Star(alpha) => {
                    Shape::DiaStar(ix(&Formula::dia(alpha.clone(), f.clone())), ix(body))
                }
                ProgramKind::Test(tau) => Shape::DiaTest(ix(tau), ix(body)),
            },
            FormulaKind::Box(prog, body) => match prog.kind() {
                ProgramKind::Atom(a) => Shape::BoxAtom(a.clone(), ix(body)),
                ProgramKind::Seq(alpha, beta) => Shape::BoxSeq(ix(&Formula::boxm(
                    alpha.clone(),
                    Formula::boxm(beta.clone(), body.clone()),
                ))),
                ProgramKind::Choice(alpha, beta) => Shape::BoxChoice(
                    ix(&Formula::boxm(alpha.clone(), body.clone())),
                    ix(&Formula::boxm(beta.clone(), body.clone())),
                ),
                ProgramKind::Star(alpha) => {
                    Shape::BoxStar(ix(&Formula::boxm(alpha.clone(), f.clone())), ix(body))
                }
                ProgramKind::Test(tau) => Shape::BoxTest(ix(&tau.negate()), ix(body)),
            },
        }
    }

    pub fn ok_mask(&self, side: Side) -> &Bits {
        match side {
            Side::Left => &self.left_ok,
            Side::Right => &self.right_ok,
        }
    }

    /// The index of `<a>f` if the table holds that formula at all.
    pub fn wrap_index(&self, action: &AtomicAction, body: u32) -> Option<u32> {
        self.wrap.get(&(action.clone(), body)).copied()
    }

    /// The closure-with-negations of one component of a position, as a mask.
    pub fn component_closure(&self, pos: &Pos, side: Side) -> Bits {
        let mut mask = Bits::empty(self.words);
        for i in pos.member_indices(side) {
            mask.union_with(&self.fl_neg_mask[i as usize]);
        }
        mask
    }

    pub fn intern(&self, seq: &SplitSequent) -> Result<Pos, Error> {
        let mut pos = Pos {
            left: Bits::empty(self.words),
            right: Bits::empty(self.words),
            focus: None,
        };
        for side in [Side::Left, Side::Right] {
            for af in seq.component(side).iter() {
                let i = *self
                    .index
                    .get(&af.formula)
                    .filter(|&&i| self.ok_mask(side).get(i))
                    .ok_or_else(|| Error::ContextViolation(af.formula.to_string()))?;
                match af.annotation {
                    Annotation::Unfocused => pos.bits_mut(side).set(i),
                    Annotation::Focused => pos.focus = Some((side, i)),
                }
            }
        }
        Ok(pos)
    }

    pub fn extern_seq(&self, pos: &Pos) -> SplitSequent {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (side, out) in [(Side::Left, &mut left), (Side::Right, &mut right)] {
            for i in pos.bits(side).ones() {
                out.push(AnnotatedFormula::unfocused(self.formulas[i as usize].clone()));
            }
        }
        if let Some((side, i)) = pos.focus {
            let af = AnnotatedFormula::focused(self.formulas[i as usize].clone());
            match side {
                Side::Left => left.push(af),
                Side::Right => right.push(af),
            }
        }
        SplitSequent::new(
            AnnotatedSequent::new(left).expect("one focus overall"),
            AnnotatedSequent::new(right).expect("one focus overall"),
        )
        .expect("one focus overall")
    }

    pub fn formula(&self, i: u32) -> &Formula {
        &self.formulas[i as usize]
    }
}
