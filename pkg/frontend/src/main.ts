// Application wiring: one store, explicit re-render, server interaction via
// TriageApi. Everything except POST /api/verdict is read-only.

import { TriageApi } from './api.js';
import { MALWARE_BANDS } from './bands.js';
import {
  renderDetail,
  renderError,
  renderOverwriteConfirm,
  renderQueueTable,
  renderToast,
} from './render.js';
import {
  applyVerdict,
  initialState,
  reconcileItem,
  selectItem,
  visibleItems,
  withError,
  withItems,
  type ViewState,
} from './state.js';
import type { ItemDetail, ReviewedFilter, ReviewerVerdict } from './types.js';

const VERDICTS: ReviewerVerdict[] = ['malicious', 'benign', 'unsure'];

export interface App {
  refresh(): Promise<void>;
  state(): ViewState;
}

export function initApp(root: HTMLElement, api: TriageApi): App {
  let state = initialState();
  let detailCache: ItemDetail | null = null;
  let confirmBar: HTMLElement | null = null;

  root.innerHTML = `
    <header>
      <h1>Package triage</h1>
      <div class="controls">
        <label>min malware
          <select id="min-malware">
            <option value="0.5" selected>0.5</option>
            <option value="0.25">0.25</option>
            <option value="0">0</option>
          </select>
        </label>
        <label>band
          <select id="band-filter"><option value="">all bands</option></select>
        </label>
        <label>status
          <select id="reviewed-filter">
            <option value="all" selected>all</option>
            <option value="unreviewed">unreviewed</option>
            <option value="reviewed">reviewed</option>
          </select>
        </label>
        <button id="refresh">Refresh</button>
      </div>
    </header>
    <main>
      <section id="queue-area"></section>
      <aside id="detail-area"><p class="empty-state">Select an item to review.</p></aside>
    </main>
    <footer>
      <div id="verdict-controls"></div>
      <div id="notice-area"></div>
    </footer>
  `;

  const queueArea = root.querySelector<HTMLElement>('#queue-area')!;
  const detailArea = root.querySelector<HTMLElement>('#detail-area')!;
  const verdictControls = root.querySelector<HTMLElement>('#verdict-controls')!;
  const noticeArea = root.querySelector<HTMLElement>('#notice-area')!;
  const bandFilter = root.querySelector<HTMLSelectElement>('#band-filter')!;
  for (const band of MALWARE_BANDS) {
    const option = document.createElement('option');
    option.value = band;
    option.textContent = band;
    bandFilter.appendChild(option);
  }

  function notify(message: string): void {
    noticeArea.innerHTML = '';
    noticeArea.appendChild(renderToast(message));
  }

  function renderQueue(): void {
    queueArea.innerHTML = '';
    if (state.error !== null) {
      queueArea.appendChild(renderError(state.error, () => void refresh()));
      return;
    }
    const rows = visibleItems(state.items, state.filters);
    queueArea.appendChild(renderQueueTable(rows, state.selectedId, (id) => void select(id)));
  }

  function renderVerdictButtons(): void {
    verdictControls.innerHTML = '';
    for (const verdict of VERDICTS) {
      const button = document.createElement('button');
      button.className = `verdict-btn verdict-${verdict}`;
      button.textContent = verdict;
      button.disabled = state.selectedId === null;
      button.addEventListener('click', () => void submit(verdict, false));
      verdictControls.appendChild(button);
    }
    if (confirmBar) verdictControls.appendChild(confirmBar);
  }

  function renderDetailArea(): void {
    detailArea.innerHTML = '';
    if (detailCache && detailCache.id === state.selectedId) {
      detailArea.appendChild(renderDetail(detailCache));
    } else {
      const hint = document.createElement('p');
      hint.className = 'empty-state';
      hint.textContent = 'Select an item to review.';
      detailArea.appendChild(hint);
    }
  }

  function renderAll(): void {
    renderQueue();
    renderDetailArea();
    renderVerdictButtons();
  }

  async function refresh(): Promise<void> {
    try {
      const items = await api.queue(state.filters.minMalware, 'all');
      state = withItems(state, items);
    } catch (err) {
      state = withError(state, err instanceof Error ? err.message : String(err));
    }
    renderAll();
  }

  async function select(id: string): Promise<void> {
    state = selectItem(state, id);
    confirmBar = null;
    try {
      detailCache = await api.item(id);
    } catch (err) {
      detailCache = null;
      notify(err instanceof Error ? err.message : String(err));
    }
    renderAll();
  }

  async function submit(verdict: ReviewerVerdict, overwrite: boolean): Promise<void> {
    const id = state.selectedId;
    if (id === null) return;
    confirmBar = null;
    // optimistic: mark the row, revert if the server disagrees
    const { items, previous } = applyVerdict(state.items, id, verdict);
    state = { ...state, items };
    renderAll();
    try {
      const result = await api.submitVerdict(id, verdict, overwrite);
      if (result.status === 'conflict') {
        state = { ...state, items: applyVerdict(state.items, id, previous).items };
        confirmBar = renderOverwriteConfirm(
          verdict,
          () => void submit(verdict, true),
          () => {
            confirmBar = null;
            renderAll();
          },
        );
        renderAll();
        return;
      }
      state = { ...state, items: reconcileItem(state.items, result.item) };
      if (detailCache && detailCache.id === id) {
        detailCache = { ...detailCache, ...result.item };
      }
      notify(`Recorded "${verdict}" for ${id}.`);
    } catch (err) {
      state = { ...state, items: applyVerdict(state.items, id, previous).items };
      notify(err instanceof Error ? err.message : String(err));
    }
    renderAll();
  }

  root.querySelector<HTMLButtonElement>('#refresh')!.addEventListener('click', () => void refresh());
  root.querySelector<HTMLSelectElement>('#min-malware')!.addEventListener('change', (event) => {
    state = {
      ...state,
      filters: { ...state.filters, minMalware: Number((event.target as HTMLSelectElement).value) },
    };
    void refresh();
  });
  bandFilter.addEventListener('change', (event) => {
    const value = (event.target as HTMLSelectElement).value;
    state = { ...state, filters: { ...state.filters, band: value === '' ? null : value } };
    renderAll();
  });
  root.querySelector<HTMLSelectElement>('#reviewed-filter')!.addEventListener('change', (event) => {
    const value = (event.target as HTMLSelectElement).value as ReviewedFilter;
    state = { ...state, filters: { ...state.filters, reviewed: value } };
    renderAll();
  });

  void refresh();
  return { refresh, state: () => state };
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  initApp(document.getElementById('app')!, new TriageApi());
}
