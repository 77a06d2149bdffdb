package shop.model;

/** A sellable item. */
public class Item {
    private int price;
    private String name;
    public int qty;

    public Item(String name, int price) {
        this.name = name;
        this.price = price;
    }

    public int getPrice() {
        return price;
    }

    public void setPrice(int p) {
        this.price = p;
    }

    // not an accessor: computes
    public int total() {
        return price * qty;
    }
}
