import { Answer } from './types.js';

export interface Turn {
  readonly query: string;
  readonly answer: Answer;
}

// One in-flight query per conversation; turns are append-only for the
// lifetime of the session.
export class ConversationView {
  private readonly history: Turn[] = [];
  private inFlight = false;

  constructor(public readonly conversationId: string) {}

  get turns(): readonly Turn[] {
    return this.history;
  }

  get pending(): boolean {
    return this.inFlight;
  }

  beginQuery(): void {
    if (this.inFlight) {
      throw new Error('a query is already in flight for this conversation');
    }
    this.inFlight = true;
  }

  completeTurn(query: string, answer: Answer): void {
    if (!this.inFlight) {
      throw new Error('completeTurn without beginQuery');
    }
    this.history.push(Object.freeze({ query, answer }));
    this.inFlight = false;
  }

  abortQuery(): void {
    this.inFlight = false;
  }
}
