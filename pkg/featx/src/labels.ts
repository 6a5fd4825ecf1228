/**
 * Canonical banknote class labels and the folder-name grammar.
 *
 * Labels render as EUR_<DDD>_<s>_<o> with a zero-padded denomination,
 * series a or b and orientation 1..4. The 40 valid combinations sorted
 * lexicographically define class indices 1..40; the folder name "cat1"
 * marks objects outside every banknote class (label 0).
 */

const SERIES_B_DENOMS = new Set([5, 10, 20]);
const ALL_DENOMS = [5, 10, 20, 50, 100, 200, 500];

const LABEL_RE = /^EUR_(\d{3})_([ab])_([1-4])$/;

function buildCanonicalLabels(): string[] {
  const labels: string[] = [];
  for (const denom of ALL_DENOMS) {
    const seriesList = SERIES_B_DENOMS.has(denom) ? ['a', 'b'] : ['a'];
    for (const series of seriesList) {
      for (let orientation = 1; orientation <= 4; orientation++) {
        labels.push(
          `EUR_${String(denom).padStart(3, '0')}_${series}_${orientation}`,
        );
      }
    }
  }
  return labels.sort();
}

export const CANONICAL_LABELS: readonly string[] = buildCanonicalLabels();

const INDEX_BY_LABEL = new Map(CANONICAL_LABELS.map((s, i) => [s, i + 1]));

/** 1-based class index of a canonical label; throws on anything else. */
export function classIndex(label: string): number {
  const m = LABEL_RE.exec(label);
  if (!m) {
    throw new Error(`malformed class label: ${JSON.stringify(label)}`);
  }
  const index = INDEX_BY_LABEL.get(label);
  if (index === undefined) {
    throw new Error(`label outside the class set: ${JSON.stringify(label)}`);
  }
  return index;
}

/** Label of a class folder: a canonical banknote label, or "cat1" for 0. */
export function folderLabel(name: string): number {
  if (name === 'cat1') {
    return 0;
  }
  return classIndex(name);
}
