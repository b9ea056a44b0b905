import type { SubexprRow, WitnessView } from "../src/types.js";

/** Rows shaped like a masked-guard session: the guard is a perfect proxy
 * with influence 0.5; everything else sits outside the (0.9, 0.4) region. */
export function maskedRows(): SubexprRow[] {
  const base = {
    p2: "lambda purchase, engagement, u. ...",
    reach_prob: 1.0,
  };
  return [
    {
      ...base,
      fingerprint: "fp-root",
      p1: "lambda purchase, engagement. ite(purchase <= 1.0, ...)",
      positions: ["e"],
      association: 0.0,
      influence: 1.0,
      subterm_size: 13,
      position: "e",
      parent: "",
    },
    {
      ...base,
      fingerprint: "fp-guard",
      p1: "lambda purchase, engagement. purchase <= 1.0",
      positions: ["1"],
      association: 1.0,
      influence: 0.5,
      subterm_size: 3,
      position: "1",
      parent: "e",
    },
    {
      ...base,
      fingerprint: "fp-purchase",
      p1: "lambda purchase, engagement. purchase",
      positions: ["1.1"],
      association: 0.5,
      influence: 0.5,
      subterm_size: 1,
      position: "1.1",
      parent: "1",
    },
    {
      ...base,
      fingerprint: "fp-engagement",
      p1: "lambda purchase, engagement. engagement <= 0.5",
      positions: ["2.1", "3.1"],
      association: 0.0,
      influence: 0.5,
      subterm_size: 3,
      position: "2.1",
      parent: "2",
    },
  ];
}

export function maskedWitness(): WitnessView {
  return {
    fingerprint: "fp-guard",
    p1: "lambda purchase, engagement. purchase <= 1.0",
    p2: "lambda purchase, engagement, u. ite(u, ...)",
    positions: ["1"],
    association: 1.0,
    influence: 0.5,
    reach_prob: 1.0,
    subterm_size: 3,
    verdict: "undecided",
    size: 3,
  };
}
