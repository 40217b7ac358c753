// Score band labels and styling, keyed to the report-template boundaries
// (boundaries belong to the upper band; exactly 0 malware is its own band).

export const MALWARE_BANDS = [
  'No malicious intent',
  'Low possibility of malicious intent',
  'Possibly malicious behavior',
  'Likely malicious behavior',
  'High probability of malicious behavior',
] as const;

export function malwareBand(score: number): string {
  if (score < 0 || score > 1) throw new RangeError(`score ${score} outside [0, 1]`);
  if (score === 0) return MALWARE_BANDS[0];
  if (score >= 0.75) return MALWARE_BANDS[4];
  if (score >= 0.5) return MALWARE_BANDS[3];
  if (score >= 0.25) return MALWARE_BANDS[2];
  return MALWARE_BANDS[1];
}

export function securityBand(score: number): string {
  if (score < 0 || score > 1) throw new RangeError(`score ${score} outside [0, 1]`);
  if (score >= 0.75) return 'Extremely dangerous, package should not be used';
  if (score >= 0.5) return 'Security alert should be reviewed';
  if (score >= 0.25) return 'Security warning, no immediate danger';
  return 'No significant threat; we can safely ignore';
}

// CSS class per malware band, used to color queue rows and score chips.
export function bandClass(score: number | null): string {
  if (score === null) return 'band-unknown';
  if (score === 0) return 'band-none';
  if (score >= 0.75) return 'band-high';
  if (score >= 0.5) return 'band-likely';
  if (score >= 0.25) return 'band-possible';
  return 'band-low';
}
