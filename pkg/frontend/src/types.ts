// Shapes served by the triage API.

export type ReviewerVerdict = 'malicious' | 'benign' | 'unsure';

export interface QueueItem {
  id: string;
  package: string;
  version: string;
  file_path: string;
  outcome: 'analyzed' | 'skipped' | 'failed';
  skipped: string | null;
  failed: string | null;
  malware: number | null;
  security_risk: number | null;
  confidence: number | null;
  obfuscated: number | null;
  malware_band: string | null;
  security_band: string | null;
  triage_priority: number;
  reviewer_verdict: ReviewerVerdict | null;
  reviewed_at: string | null;
}

export interface RepairNote {
  kind: string;
  detail: string;
}

export interface FinalReport {
  purpose: string;
  sources: string;
  sinks: string;
  flows: string;
  anomalies: string;
  analysis: string;
  conclusion: string;
  confidence: number;
  obfuscated: number;
  malware: number;
  securityRisk: number;
  violations: RepairNote[];
}

export interface PreScreenFinding {
  rule_id: string;
  category: string;
  file_path: string;
  line: number;
  excerpt: string;
}

export interface FileDetail {
  path: string;
  outcome: string;
  skipped: string | null;
  failed: string | null;
  attempts: number;
  final_report: FinalReport | null;
  stage1_reports: (FinalReport | null)[];
  stage2_reports: (FinalReport | null)[];
  prescreen_findings: PreScreenFinding[];
}

export interface ItemDetail extends QueueItem {
  detail: FileDetail;
}

export interface Summary {
  items: number;
  reviewed: number;
  by_malware_band: Record<string, number>;
}

export type ReviewedFilter = 'all' | 'reviewed' | 'unreviewed';

export interface Filters {
  minMalware: number;
  band: string | null;
  reviewed: ReviewedFilter;
}
