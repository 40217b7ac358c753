// Typed client for the triage service. The fetch function is injectable so
// tests can drive the full flow against an in-memory server.

import type { ItemDetail, QueueItem, ReviewerVerdict, Summary } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export type VerdictResult =
  | { status: 'ok'; item: QueueItem }
  | { status: 'conflict' };

export class ApiError extends Error {
  constructor(message: string, readonly httpStatus?: number) {
    super(message);
  }
}

export class TriageApi {
  constructor(
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base = '',
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path);
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (!resp.ok) {
      throw new ApiError(`request failed: HTTP ${resp.status}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  async queue(minMalware: number, reviewed: 'all' | 'reviewed' | 'unreviewed'): Promise<QueueItem[]> {
    const params = new URLSearchParams({
      min_malware: String(minMalware),
      status: reviewed,
    });
    const body = await this.getJson<{ items: QueueItem[] }>(`/api/queue?${params}`);
    return body.items;
  }

  async item(id: string): Promise<ItemDetail> {
    return this.getJson<ItemDetail>(`/api/item/${encodeURIComponent(id)}`);
  }

  async summary(): Promise<Summary> {
    return this.getJson<Summary>('/api/summary');
  }

  async submitVerdict(
    id: string,
    verdict: ReviewerVerdict,
    overwrite = false,
  ): Promise<VerdictResult> {
    const query = overwrite ? '?overwrite=true' : '';
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.base}/api/verdict${query}`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ id, verdict }),
      });
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (resp.status === 409) {
      return { status: 'conflict' };
    }
    if (!resp.ok) {
      throw new ApiError(`verdict rejected: HTTP ${resp.status}`, resp.status);
    }
    return { status: 'ok', item: (await resp.json()) as QueueItem };
  }
}
