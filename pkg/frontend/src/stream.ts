import { Answer, StreamFrame, streamFrameSchema } from './types.js';

// Parses the /v1/query/stream ndjson protocol incrementally. Frames may
// arrive split across arbitrary network chunk boundaries.
export class NdjsonStream {
  private buffer = '';

  feed(chunk: string): StreamFrame[] {
    this.buffer += chunk;
    const frames: StreamFrame[] = [];
    let newline = this.buffer.indexOf('\n');
    while (newline >= 0) {
      const line = this.buffer.slice(0, newline).trim();
      this.buffer = this.buffer.slice(newline + 1);
      if (line.length > 0) {
        frames.push(streamFrameSchema.parse(JSON.parse(line)));
      }
      newline = this.buffer.indexOf('\n');
    }
    return frames;
  }
}

export interface StreamResult {
  text: string;
  answer: Answer | null;
}

// Text accumulates frame by frame; citations become available only once the
// final frame lands, matching the wire contract.
export function accumulate(frames: StreamFrame[], prior?: StreamResult): StreamResult {
  const result: StreamResult = prior ?? { text: '', answer: null };
  for (const frame of frames) {
    if (frame.type === 'text') {
      result.text += frame.text;
    } else {
      result.answer = frame.answer;
    }
  }
  return result;
}
