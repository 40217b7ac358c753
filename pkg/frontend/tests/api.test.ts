import { describe, expect, it } from 'vitest';

import { ApiError, TriageApi } from '../src/api.js';
import { FakeServer, makeItem } from './fake_server.js';

function serverWith(ids: Array<[string, number]>): FakeServer {
  return new FakeServer(ids.map(([id, malware]) => makeItem({ id, malware })));
}

describe('TriageApi.queue', () => {
  it('passes the filter through and returns server ordering', async () => {
    const server = serverWith([
      ['low', 0.3],
      ['high', 1.0],
      ['mid', 0.6],
    ]);
    const api = new TriageApi(server.fetch);
    const items = await api.queue(0.5, 'all');
    expect(items.map((i) => i.id)).toEqual(['high', 'mid']);
    const everything = await api.queue(0, 'all');
    expect(everything.map((i) => i.id)).toEqual(['high', 'mid', 'low']);
  });

  it('raises ApiError when the service is unreachable', async () => {
    const server = serverWith([['a', 1]]);
    server.failNextRequests = 1;
    const api = new TriageApi(server.fetch);
    await expect(api.queue(0.5, 'all')).rejects.toBeInstanceOf(ApiError);
  });
});

describe('TriageApi.item', () => {
  it('fetches the detail payload', async () => {
    const server = serverWith([['a', 0.8]]);
    const api = new TriageApi(server.fetch);
    const detail = await api.item('a');
    expect(detail.detail.final_report?.malware).toBe(0.8);
    expect(detail.detail.prescreen_findings.length).toBeGreaterThan(0);
  });

  it('surfaces 404 as ApiError with status', async () => {
    const api = new TriageApi(serverWith([]).fetch);
    await expect(api.item('missing')).rejects.toMatchObject({ httpStatus: 404 });
  });
});

describe('TriageApi.submitVerdict', () => {
  it('records a first verdict', async () => {
    const server = serverWith([['a', 0.9]]);
    const api = new TriageApi(server.fetch);
    const result = await api.submitVerdict('a', 'malicious');
    expect(result).toMatchObject({ status: 'ok' });
    expect(server.items.get('a')?.reviewer_verdict).toBe('malicious');
  });

  it('returns conflict on repeat without overwrite', async () => {
    const server = serverWith([['a', 0.9]]);
    const api = new TriageApi(server.fetch);
    await api.submitVerdict('a', 'malicious');
    const second = await api.submitVerdict('a', 'benign');
    expect(second).toEqual({ status: 'conflict' });
    expect(server.items.get('a')?.reviewer_verdict).toBe('malicious');
  });

  it('overwrites when asked', async () => {
    const server = serverWith([['a', 0.9]]);
    const api = new TriageApi(server.fetch);
    await api.submitVerdict('a', 'malicious');
    const result = await api.submitVerdict('a', 'benign', true);
    expect(result.status).toBe('ok');
    expect(server.items.get('a')?.reviewer_verdict).toBe('benign');
  });

  it('propagates network failures as ApiError', async () => {
    const server = serverWith([['a', 0.9]]);
    server.failNextRequests = 1;
    const api = new TriageApi(server.fetch);
    await expect(api.submitVerdict('a', 'unsure')).rejects.toBeInstanceOf(ApiError);
  });
});
