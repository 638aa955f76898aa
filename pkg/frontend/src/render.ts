import { Answer, ApiError, Chunk, Citation, Verdict } from './types.js';

// Pure HTML-string builders so the whole render layer is testable without a
// DOM. Everything shown comes straight from API responses.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderRefusalBadge(answer: Answer): string {
  if (!answer.refusal) return '';
  const reason = escapeHtml(answer.refusal_reason ?? 'refused');
  return `<span class="badge badge-refusal" title="${reason}">refused: ${reason}</span>`;
}

export function renderVerdictIndicator(verdict: Verdict | null): string {
  if (verdict === null) return '';
  const pct = (verdict.grounded_score * 100).toFixed(0);
  return (
    `<span class="verdict verdict-${verdict.decision}">` +
    `${verdict.decision} (${pct}% grounded, ${verdict.method})</span>`
  );
}

export function renderStageProfile(answer: Answer): string {
  const stages = answer.stage_profile
    .map((s) => `<li class="stage">${escapeHtml(s)}</li>`)
    .join('');
  return `<ol class="stage-profile">${stages}</ol>`;
}

function citationEntry(citation: Citation, chunk: Chunk | undefined, title: string): string {
  const score = citation.relevance_score.toFixed(3);
  const body =
    chunk === undefined
      ? ''
      : `<pre class="chunk-text">${escapeHtml(chunk.text)}</pre>`;
  return (
    `<li class="citation" data-chunk-id="${escapeHtml(citation.chunk_id)}">` +
    `<span class="citation-title">${escapeHtml(title)}</span>` +
    `<span class="citation-score">${score}</span>${body}</li>`
  );
}

// One entry per citation, in citation order; chunk text shown verbatim when
// the chunk has been fetched. Refusals have no citations, hence no panel.
export function renderCitationPanel(
  answer: Answer,
  chunksById: Map<string, Chunk> = new Map(),
  titlesByDoc: Map<string, string> = new Map(),
): string {
  if (answer.citations.length === 0) return '';
  const entries = answer.citations
    .map((c) =>
      citationEntry(c, chunksById.get(c.chunk_id), titlesByDoc.get(c.doc_id) ?? c.doc_id),
    )
    .join('');
  return `<ul class="citation-panel">${entries}</ul>`;
}

export function renderAnswer(
  answer: Answer,
  chunksById?: Map<string, Chunk>,
  titlesByDoc?: Map<string, string>,
): string {
  const text = `<div class="answer-text">${escapeHtml(answer.text)}</div>`;
  if (answer.refusal) {
    return `<div class="answer refusal">${text}${renderRefusalBadge(answer)}</div>`;
  }
  return (
    `<div class="answer">${text}` +
    renderVerdictIndicator(answer.verification) +
    renderCitationPanel(answer, chunksById, titlesByDoc) +
    renderStageProfile(answer) +
    `</div>`
  );
}

// code + trace_id shown so a user can copy both into a support ticket
export function renderApiError(error: ApiError): string {
  return (
    `<div class="api-error"><span class="error-code">${escapeHtml(error.code)}</span> ` +
    `${escapeHtml(error.message)} ` +
    `<code class="trace-id" data-copy="${escapeHtml(error.trace_id)}">` +
    `${escapeHtml(error.trace_id)}</code></div>`
  );
}
