// In-memory stand-in mirroring the triage service contract: priority-ordered
// queue with min_malware/status filters, 404 on unknown ids, 409 on repeat
// verdicts without ?overwrite=true, and journal-like persistence for the
// lifetime of the instance.

import type { FetchLike } from '../src/api.js';
import type { FileDetail, QueueItem, ReviewerVerdict } from '../src/types.js';

export interface FakeItem extends QueueItem {
  detail: FileDetail;
}

export function makeItem(partial: Partial<FakeItem> & { id: string }): FakeItem {
  const malware = partial.malware ?? 0;
  const report = {
    purpose: 'Automated triage of the submitted file.',
    sources: 'sources text',
    sinks: 'sinks text',
    flows: 'flows text',
    anomalies: 'anomalies text',
    analysis: 'analysis text',
    conclusion: 'conclusion text',
    confidence: 0.9,
    obfuscated: 0.1,
    malware,
    securityRisk: partial.security_risk ?? malware,
    violations: [],
  };
  return {
    package: 'pkg',
    version: '1.0.0',
    file_path: `${partial.id}.js`,
    outcome: 'analyzed',
    skipped: null,
    failed: null,
    malware,
    security_risk: partial.security_risk ?? malware,
    confidence: 0.9,
    obfuscated: 0.1,
    malware_band: null,
    security_band: null,
    triage_priority: malware,
    reviewer_verdict: null,
    reviewed_at: null,
    detail: {
      path: `${partial.id}.js`,
      outcome: 'analyzed',
      skipped: null,
      failed: null,
      attempts: 1,
      final_report: report,
      stage1_reports: [report, report],
      stage2_reports: [report, report],
      prescreen_findings: [
        {
          rule_id: 'NET-006',
          category: 'network',
          file_path: `${partial.id}.js`,
          line: 2,
          excerpt: 'curl https://collector.example',
        },
      ],
    },
    ...partial,
  };
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export class FakeServer {
  readonly items = new Map<string, FakeItem>();
  failNextRequests = 0;

  constructor(items: FakeItem[]) {
    for (const item of items) this.items.set(item.id, item);
  }

  /** Server-side queue semantics, exposed for parity assertions in tests. */
  queue(minMalware: number, status: string): QueueItem[] {
    const rows = [...this.items.values()]
      .filter((item) => {
        if (item.malware === null) return minMalware <= 0;
        if (item.malware < minMalware) return false;
        if (status === 'reviewed' && item.reviewer_verdict === null) return false;
        if (status === 'unreviewed' && item.reviewer_verdict !== null) return false;
        return true;
      })
      .map(({ detail: _detail, ...row }) => row);
    rows.sort((a, b) =>
      a.triage_priority === b.triage_priority
        ? a.id.localeCompare(b.id)
        : b.triage_priority - a.triage_priority,
    );
    return rows;
  }

  fetch: FetchLike = async (input, init) => {
    if (this.failNextRequests > 0) {
      this.failNextRequests -= 1;
      throw new TypeError('network down');
    }
    const url = new URL(input, 'http://fake');
    if (url.pathname === '/api/queue') {
      const min = Number(url.searchParams.get('min_malware') ?? '0.5');
      const status = url.searchParams.get('status') ?? 'all';
      return json({ items: this.queue(min, status) });
    }
    if (url.pathname.startsWith('/api/item/')) {
      const id = decodeURIComponent(url.pathname.slice('/api/item/'.length));
      const item = this.items.get(id);
      return item ? json(item) : json({ detail: 'unknown item' }, 404);
    }
    if (url.pathname === '/api/verdict' && init?.method === 'POST') {
      const body = JSON.parse(String(init.body)) as { id: string; verdict: ReviewerVerdict };
      const item = this.items.get(body.id);
      if (!item) return json({ detail: 'unknown item' }, 404);
      if (item.reviewer_verdict !== null && url.searchParams.get('overwrite') !== 'true') {
        return json({ detail: 'verdict already recorded' }, 409);
      }
      item.reviewer_verdict = body.verdict;
      item.reviewed_at = '2026-01-01T00:00:00Z';
      const { detail: _detail, ...row } = item;
      return json(row);
    }
    return json({ detail: 'not found' }, 404);
  };
}
