import { describe, expect, it } from 'vitest';

import {
  DEFAULT_FILTERS,
  applyVerdict,
  initialState,
  reconcileItem,
  visibleItems,
  withItems,
} from '../src/state.js';
import { makeItem } from './fake_server.js';

const items = [
  makeItem({ id: 'a', malware: 1.0, malware_band: 'High probability of malicious behavior' }),
  makeItem({ id: 'b', malware: 0.6, malware_band: 'Likely malicious behavior' }),
  makeItem({ id: 'c', malware: 0.6, malware_band: 'Likely malicious behavior', reviewer_verdict: 'benign' }),
];

describe('visibleItems', () => {
  it('defaults pass everything through unchanged', () => {
    expect(visibleItems(items, DEFAULT_FILTERS).map((i) => i.id)).toEqual(['a', 'b', 'c']);
  });

  it('never reorders, only narrows', () => {
    const filtered = visibleItems(items, { ...DEFAULT_FILTERS, band: 'Likely malicious behavior' });
    expect(filtered.map((i) => i.id)).toEqual(['b', 'c']);
  });

  it('filters by reviewed status', () => {
    expect(
      visibleItems(items, { ...DEFAULT_FILTERS, reviewed: 'reviewed' }).map((i) => i.id),
    ).toEqual(['c']);
    expect(
      visibleItems(items, { ...DEFAULT_FILTERS, reviewed: 'unreviewed' }).map((i) => i.id),
    ).toEqual(['a', 'b']);
  });
});

describe('verdict transitions', () => {
  it('applies optimistically and reports the previous value', () => {
    const { items: next, previous } = applyVerdict(items, 'a', 'malicious');
    expect(previous).toBeNull();
    expect(next.find((i) => i.id === 'a')?.reviewer_verdict).toBe('malicious');
    // original array untouched
    expect(items.find((i) => i.id === 'a')?.reviewer_verdict).toBeNull();
  });

  it('reverts with the captured previous value', () => {
    const first = applyVerdict(items, 'c', 'malicious');
    expect(first.previous).toBe('benign');
    const reverted = applyVerdict(first.items, 'c', first.previous).items;
    expect(reverted.find((i) => i.id === 'c')?.reviewer_verdict).toBe('benign');
  });

  it('reconciles a server row into the list', () => {
    const updated = { ...items[1], reviewer_verdict: 'unsure' as const, reviewed_at: 'now' };
    const next = reconcileItem(items, updated);
    expect(next.find((i) => i.id === 'b')?.reviewer_verdict).toBe('unsure');
    expect(next.map((i) => i.id)).toEqual(['a', 'b', 'c']);
  });
});

describe('state container', () => {
  it('keeps selection when the item survives a refresh', () => {
    let state = { ...initialState(), selectedId: 'b' };
    state = withItems(state, items);
    expect(state.selectedId).toBe('b');
  });

  it('drops selection when the item disappears', () => {
    let state = { ...initialState(), selectedId: 'zz' };
    state = withItems(state, items);
    expect(state.selectedId).toBeNull();
  });
});
