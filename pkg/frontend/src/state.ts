// Pure view-state transitions. Rendering is a function of (server items,
// filters, selection); client-side filters narrow but never reorder.

import type { Filters, QueueItem, ReviewerVerdict } from './types.js';

export const DEFAULT_FILTERS: Filters = {
  minMalware: 0.5,
  band: null,
  reviewed: 'all',
};

export interface ViewState {
  items: QueueItem[];
  filters: Filters;
  selectedId: string | null;
  error: string | null;
}

export function initialState(): ViewState {
  return { items: [], filters: { ...DEFAULT_FILTERS }, selectedId: null, error: null };
}

/** Apply client-side filters, preserving the server's ordering. */
export function visibleItems(items: QueueItem[], filters: Filters): QueueItem[] {
  return items.filter((item) => {
    if (filters.band !== null && item.malware_band !== filters.band) return false;
    if (filters.reviewed === 'reviewed' && item.reviewer_verdict === null) return false;
    if (filters.reviewed === 'unreviewed' && item.reviewer_verdict !== null) return false;
    return true;
  });
}

export function selectItem(state: ViewState, id: string | null): ViewState {
  return { ...state, selectedId: id };
}

export function withItems(state: ViewState, items: QueueItem[]): ViewState {
  const stillVisible = items.some((i) => i.id === state.selectedId);
  return {
    ...state,
    items,
    error: null,
    selectedId: stillVisible ? state.selectedId : null,
  };
}

export function withError(state: ViewState, message: string): ViewState {
  return { ...state, error: message };
}

/** Optimistically mark a verdict; returns the previous value for revert. */
export function applyVerdict(
  items: QueueItem[],
  id: string,
  verdict: ReviewerVerdict | null,
  reviewedAt: string | null = null,
): { items: QueueItem[]; previous: ReviewerVerdict | null } {
  let previous: ReviewerVerdict | null = null;
  const next = items.map((item) => {
    if (item.id !== id) return item;
    previous = item.reviewer_verdict;
    return { ...item, reviewer_verdict: verdict, reviewed_at: reviewedAt };
  });
  return { items: next, previous };
}

export function reconcileItem(items: QueueItem[], updated: QueueItem): QueueItem[] {
  return items.map((item) => (item.id === updated.id ? { ...item, ...updated } : item));
}
