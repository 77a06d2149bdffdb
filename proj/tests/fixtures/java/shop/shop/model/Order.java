package shop.model;

public class Order implements Priced {
    private Item item;
    private Customer customer;
    int count;

    public int cost() {
        int base = item.getPrice();
        int extra = item.total();
        if (count > 10 && base > 0) {
            base = base - 1;
        }
        return base * count + extra + item.qty;
    }

    public String label() {
        return customer.getAddress().getCity();
    }

    public void restock(int n) {
        for (int i = 0; i < n; i++) {
            while (count < i) {
                count++;
            }
        }
    }
}
